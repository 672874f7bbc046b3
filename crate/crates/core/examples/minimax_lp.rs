//! Solves small zero-sum matrix games with the simplex solver and compares the
//! mixed value with the best pure guarantee.

use fcl::solver::{pure_maxmin, solve_matrix_game, MatrixView};

fn main() -> fcl::Result<()> {
    let games = [
        ("matching pennies", vec![vec![1.0, -1.0], vec![-1.0, 1.0]]),
        ("rock paper scissors", vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]),
        ("saddle point", vec![vec![3.0, 1.0, 4.0], vec![2.0, 0.0, 1.0]]),
        ("skewed", vec![vec![4.0, -2.0], vec![-1.0, 3.0], vec![0.0, 0.5]]),
    ];
    for (name, rows) in games {
        let m = MatrixView::from_rows(&rows)?;
        let sol = solve_matrix_game(&m)?;
        let (pure_row, pure_value) = pure_maxmin(&m);
        println!("{name}");
        println!("  value {:.4}", sol.value);
        println!("  row strategy {:.4?}", sol.row);
        println!("  column strategy {:.4?}", sol.col);
        println!("  best pure row {pure_row} guarantees {pure_value}");
    }
    Ok(())
}
