fn main() {
    std::process::exit(sse_core::cli::run(std::env::args_os()));
}
