fn main() -> std::process::ExitCode {
    boolmin::cli::main()
}
