fn main() -> std::process::ExitCode {
    bidbench::cli::main()
}
