use qcluster_core::expansion::{compute_expansion, expansion_element, Frame};
use qcluster_core::seed::variable_along_path;
use qcluster_core::strings::chord_word;
use qcluster_core::surface::{flip_polygon_model, polygon_triangulation, quiver_of};
use std::time::Instant;

fn main() {
    let t_start = Instant::now();
    for (v, budget) in [(5usize, 1000), (6, 1000), (7, 1000), (8, 500)] {
        let diags: Vec<(usize, usize)> = (2..v - 1).map(|i| (0, i)).collect();
        let (t0, model0) = polygon_triangulation(v, &diags).unwrap();
        let tris = t0.reachable(budget);
        let mut pairs = 0usize;
        let mut fallbacks = 0usize;
        let mut mismatches = 0usize;
        for (t, path_to) in &tris {
            // rebuild the model along the path
            let mut model = model0.clone();
            let mut cur = t0.clone();
            for &k in path_to {
                model = flip_polygon_model(&model, &cur, k).unwrap();
                cur = cur.flip(k).unwrap();
            }
            assert_eq!(cur.canonical_key(), t.canonical_key());
            let frame = Frame::initial(cur.clone()).unwrap();
            let q = quiver_of(&cur);
            for a in 0..v {
                for b in (a + 2)..v {
                    if a == 0 && b == v - 1 {
                        continue;
                    }
                    let w = chord_word(&cur, &q, &model, (a, b)).unwrap();
                    pairs += 1;
                    let exp = match compute_expansion(&frame, &w, 2000) {
                        Ok(e) => e,
                        Err(e) => {
                            println!("  {v}-gon T#{pairs} chord ({a},{b}): EXPANSION ERROR {e}");
                            mismatches += 1;
                            continue;
                        }
                    };
                    if !exp.pointwise_canonical {
                        fallbacks += 1;
                    }
                    let elem = expansion_element(&exp.we, &frame.seed).unwrap();
                    let oracle = if exp.path.is_empty() {
                        frame.seed.variables[w.at_arc().unwrap()].clone()
                    } else {
                        variable_along_path(&frame.seed, &exp.path, *exp.path.last().unwrap())
                            .unwrap()
                    };
                    if elem != oracle {
                        mismatches += 1;
                        if mismatches < 4 {
                            println!("  MISMATCH {v}-gon chord ({a},{b})");
                        }
                    } else if !elem.all_coefficients_nonnegative() {
                        println!("  NEGATIVE {v}-gon chord ({a},{b})");
                    }
                }
            }
        }
        println!(
            "{v}-gon: {} triangulations, {pairs} pairs, {mismatches} mismatches, {fallbacks} block-offset transports, {:.1}s",
            tris.len(),
            t_start.elapsed().as_secs_f64()
        );
    }
}
