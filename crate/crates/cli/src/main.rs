fn main() {
    std::process::exit(lamina_cli::run(std::env::args_os()));
}
