fn main() {
    std::process::exit(matfunc::cli::main_with_args(std::env::args_os()));
}
