// Drive the command-line front end in process: construct a rule, save it,
// then integrate over its randomized points.

use clap::Parser;
use rqmc::cli::{run, Cli};

fn call(args: &[&str]) -> rqmc::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("rqmc").chain(args.iter().copied()))
        .map_err(|e| rqmc::RqmcError::Parse(e.to_string()))?;
    let mut out = Vec::new();
    run(&cli, &mut out)?;
    Ok(String::from_utf8_lossy(&out).into_owned())
}

pub fn run_example() -> rqmc::Result<()> {
    let dir = std::env::temp_dir().join(format!("rqmc-cli-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let rule = dir.join("rule.json");
    let json = call(&["construct", "--M", "127", "--s", "4", "--seed", "9"])?;
    std::fs::write(&rule, &json)?;
    println!("{json}");

    let rule = rule.to_string_lossy().into_owned();
    print!("{}", call(&["bound", "--M", "127", "--s", "4", "--lambda-grid", "0.6,1.0,1.5"])?);
    print!("{}", call(&["integrate", "--rule", &rule, "--f", "f1", "--shift", "--tent", "--seed", "1"])?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
