//! The fast verification report: exact identities and partition counts.

use patterned_rmt::verify::{run, VerifyLevel};
use patterned_rmt::Result;

fn main() -> Result<()> {
    let report = run(VerifyLevel::Fast, 7)?;
    print!("{}", report.render());
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
