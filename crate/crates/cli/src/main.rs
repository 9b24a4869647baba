use std::process::ExitCode;

fn main() -> ExitCode {
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let mut io = hyperflip_cli::Io { out: &mut out, err: &mut err };
    ExitCode::from(hyperflip_cli::run(std::env::args_os(), &mut io))
}
