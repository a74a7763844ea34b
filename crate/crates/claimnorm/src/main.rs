use std::process::ExitCode;

fn main() -> ExitCode {
    claimnorm::cli::main()
}
