mod args;
mod input;
mod run;

use args::{Cli, Cmd};
use clap::Parser;
use serde_json::{json, Value};

fn main() {
    let cli = Cli::parse();
    std::process::exit(real_main(&cli));
}

fn real_main(cli: &Cli) -> i32 {
    let (name, config) = describe(&cli.command);
    match dispatch(&cli.command) {
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
        Ok(done) => {
            let doc = json!({
                "command": name,
                "config": config,
                "library_version": lsqgeom::VERSION,
                "results": done.results,
                "warnings": done.warnings,
            });
            let text =
                serde_json::to_string_pretty(&doc).expect("document has no non-string keys");
            match &cli.out {
                None => println!("{text}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write --out {}: {e}", path.display());
                        return 2;
                    }
                }
            }
            done.exit
        }
    }
}

fn dispatch(cmd: &Cmd) -> Result<run::Done, String> {
    match cmd {
        Cmd::Solve(a) => run::solve_cmd(a),
        Cmd::Path(a) => run::path_cmd(a),
        Cmd::Covtest(a) => run::covtest_cmd(a),
        Cmd::Dof(a) => run::dof_cmd(a),
        Cmd::Width(a) => run::width_cmd(a),
        Cmd::Tube(a) => run::tube_cmd(a),
        Cmd::Cone(a) => run::cone_cmd(a),
        Cmd::Ecdensity(a) => run::ecdensity_cmd(a),
        Cmd::Critradius(a) => run::critradius_cmd(a),
    }
}

fn describe(cmd: &Cmd) -> (&'static str, Value) {
    fn echo<T: serde::Serialize>(a: &T) -> Value {
        serde_json::to_value(a).expect("config echo serializes")
    }
    match cmd {
        Cmd::Solve(a) => ("solve", echo(a)),
        Cmd::Path(a) => ("path", echo(a)),
        Cmd::Covtest(a) => ("covtest", echo(a)),
        Cmd::Dof(a) => ("dof", echo(a)),
        Cmd::Width(a) => ("width", echo(a)),
        Cmd::Tube(a) => ("tube", echo(a)),
        Cmd::Cone(a) => ("cone", echo(a)),
        Cmd::Ecdensity(a) => ("ecdensity", echo(a)),
        Cmd::Critradius(a) => ("critradius", echo(a)),
    }
}
