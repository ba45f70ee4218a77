fn main() {
    std::process::exit(robust_stream_cli::run(std::env::args_os()));
}
