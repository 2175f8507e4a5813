fn main() {
    std::process::exit(nullfront::cli::main_with_args(std::env::args_os()));
}
