//! Defines a new game in the text format, checks that its declared symmetry
//! holds, and asks the oracle for its values. Also shows that a lopsided
//! payoff is caught.

use fcl::game::file;
use fcl::oracle::exact_values;

// Stag hunt: both hunting the stag pays 4 each; a lone stag hunter gets 0.
const STAG_HUNT: &str = "\
name stag_hunt
players 2
states 1
actions 0 S H
actions 1 S H
initial 1
max_stage_steps 1
t 0 0 0 1 4 4
t 0 1 0 1 0 3
t 0 2 0 1 3 0
t 0 3 0 1 3 3
symmetry 1 0 | 0 | 0 1
";

fn main() -> fcl::Result<()> {
    let game = file::parse(STAG_HUNT)?;
    print!("{}", exact_values(&game, 1.0)?.report());
    print!("{}", file::to_text(&game));

    let lopsided = STAG_HUNT.replace("t 0 1 0 1 0 3", "t 0 1 0 1 1 3");
    match file::parse(&lopsided) {
        Ok(_) => println!("lopsided game accepted"),
        Err(e) => println!("lopsided game rejected: {e}"),
    }
    Ok(())
}
