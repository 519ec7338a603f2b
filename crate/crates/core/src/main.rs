fn main() {
    std::process::exit(noether::cli::main_with(std::env::args_os()));
}
