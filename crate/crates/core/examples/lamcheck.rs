use qcluster_core::seed::solve_lambda;
use qcluster_core::surface::{quiver_of, Triangulation};

fn main() {
    for (name, t) in [
        ("annulus 1+1", Triangulation::new(2, 2, vec![[2, 0, 1], [1, 3, 0]]).unwrap()),
        ("annulus 2+1", Triangulation::new(3, 3, vec![[1, 3, 0], [5, 2, 1], [0, 4, 2]]).unwrap()),
    ] {
        let q = quiver_of(&t);
        match solve_lambda(&q.b) {
            Ok(_) => println!("{name}: boundary extension solvable"),
            Err(e) => {
                println!("{name}: boundary-only fails ({e}); trying + principal rows");
                let mut b = q.b.clone();
                for j in 0..q.n {
                    let mut row = vec![0i64; q.n];
                    row[j] = 1;
                    b.push(row);
                }
                match solve_lambda(&b) {
                    Ok(_) => println!("  + principal rows: solvable"),
                    Err(e) => println!("  + principal rows: STILL FAILS {e}"),
                }
            }
        }
    }
}
