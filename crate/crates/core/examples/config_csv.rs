//! Reading a JSON configuration, reporting validation errors, and writing the
//! reproducible CSV a command-line run would produce.

use std::io;

use twowell::sweep::{self, Command};
use twowell::Config;

const GOOD: &str = r#"{
    "preset": {"name": "B9p116G"},
    "initial": {"n_a": 2000},
    "sweep": {"tau_max": 10, "points": 6}
}"#;

const BAD: &str = r#"{
    "losses": {"gamma12": -1},
    "sweep": {"points": 0}
}"#;

fn main() -> twowell::Result<()> {
    match Config::from_json(BAD)?.validate() {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected (exit code {}): {e}\n", e.exit_code()),
    }

    let cfg = Config::from_json(GOOD)?;
    let validated = cfg.validate()?;
    let result = sweep::run(Command::TwoStep, &validated)?;
    sweep::write_csv(&mut io::stdout().lock(), &result, &cfg, &validated)?;
    Ok(())
}
