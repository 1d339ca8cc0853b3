fn main() -> std::process::ExitCode {
    gapls::cli::main()
}
