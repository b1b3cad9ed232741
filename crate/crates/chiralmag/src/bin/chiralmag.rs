fn main() -> std::process::ExitCode {
    chiralmag::cli::main()
}
