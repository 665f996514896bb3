fn main() {
    std::process::exit(gosp::cli::main(std::env::args_os()));
}
