fn main() -> std::process::ExitCode {
    avg_pong::cli::main()
}
