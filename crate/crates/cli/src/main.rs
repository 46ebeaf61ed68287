fn main() {
    std::process::exit(critset_cli::run(std::env::args_os()));
}
