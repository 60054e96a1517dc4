fn main() {
    std::process::exit(rgg1d_cli::run(std::env::args_os()));
}
