//! q-numbers `[a]`, `{a}`, `λ` and the telescoping sum identity.

use qminkowski::qnum::{sum_identity, DeformationParams};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let p = DeformationParams::new(1.1)?;
    println!("q = {}, lambda = q - 1/q = {:.12}", p.q(), p.lambda());
    println!("{:>4} {:>16} {:>16}", "a", "[a]", "{a}");
    for a in -3..=5 {
        println!("{a:>4} {:>16.12} {:>16.12}", p.br(a), p.cu(a));
    }
    // [a]{a} = [2a] and [2] = {1}.
    let a = 2.5;
    println!(
        "[a]{{a}} - [2a] at a = {a}: {:.3e}",
        p.bracket(a) * p.curly(a) - p.bracket(2.0 * a)
    );
    for j in [1, 5, 30] {
        let (lhs, rhs) = sum_identity(j, &p)?;
        println!(
            "sum identity, j = {j:>2}: lhs = {lhs:.15}, rhs = {rhs:.15}, diff = {:.2e}",
            (lhs - rhs).abs()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
