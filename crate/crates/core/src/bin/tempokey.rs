fn main() {
    std::process::exit(tempokey::cli::main_with_args(std::env::args_os()));
}
