use std::process::ExitCode;

fn main() -> ExitCode {
    ddpf::cli::main(std::env::args_os())
}
