fn main() {
    std::process::exit(heisenflow::cli::main_with_args(std::env::args_os()));
}
