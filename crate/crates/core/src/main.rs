fn main() -> std::process::ExitCode {
    pentadiag::cli::main()
}
