use std::process::ExitCode;

fn main() -> ExitCode {
    limitwalk::cli::main_entry()
}
