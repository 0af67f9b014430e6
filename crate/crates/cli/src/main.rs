fn main() {
    std::process::exit(klim_cli::main_with_args(std::env::args_os()));
}
