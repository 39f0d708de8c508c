use qcluster_core::expansion::{compute_expansion, expansion_element, transport_weights, Frame};
use qcluster_core::seed::variable_along_path;
use qcluster_core::strings::{flip_string_detailed, CaseTag, StringWord};
use qcluster_core::surface::Triangulation;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

fn annulus_1_1() -> Triangulation {
    Triangulation::new(2, 2, vec![[2, 0, 1], [1, 3, 0]]).unwrap()
}
fn annulus_2_1() -> Triangulation {
    Triangulation::new(3, 3, vec![[1, 3, 0], [5, 2, 1], [0, 4, 2]]).unwrap()
}

fn arc_words(t0: &Triangulation, depth: usize, max_cross: usize) -> Vec<StringWord> {
    // walk all flip sequences (no immediate repeats); every arc of every
    // visited triangulation, transported back to t0, is an arc word
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Triangulation>, Vec<usize>)> = vec![(vec![t0.clone()], Vec::new())];
    while let Some((tris, path)) = stack.pop() {
        let t = tris.last().unwrap().clone();
        for j in 0..t.n_internal() {
            let mut w = StringWord::empty_at(j);
            for i in (0..path.len()).rev() {
                w = flip_string_detailed(&w, &tris[i + 1], path[i]).map(|o| o.word).unwrap_or_else(|e| panic!("rewrite failed: {e}"));
            }
            let w = w.canonical();
            if w.len() <= max_cross && seen.insert(w.to_text()) {
                out.push(w);
            }
        }
        if path.len() < depth {
            for k in 0..t.n_internal() {
                if path.last() == Some(&k) {
                    continue;
                }
                let mut tris2 = tris.clone();
                tris2.push(t.flip(k).unwrap());
                let mut p2 = path.clone();
                p2.push(k);
                stack.push((tris2, p2));
            }
        }
    }
    out
}

fn main() {
    let start = Instant::now();
    let mut tags: BTreeMap<CaseTag, usize> = BTreeMap::new();
    for (name, t0, budget) in [
        ("annulus 1+1", annulus_1_1(), 6),
        ("annulus 2+1", annulus_2_1(), 10),
    ] {
        let frame = Frame::initial(t0.clone()).unwrap();
        let words = arc_words(&t0, budget, 6);
        let mut checked = 0;
        let mut mismatches = 0;
        for w in &words {
            let exp = match compute_expansion(&frame, w, 3000) {
                Ok(e) => e,
                Err(e) => {
                    println!("  {name} word '{}': ERROR {e}", w.to_text());
                    mismatches += 1;
                    continue;
                }
            };
            // collect tags: transports along the chain plus every single
            // flip direction at every intermediate frame (the criterion-3
            // sweep)
            {
                let mut frames = vec![frame.clone()];
                let mut wchain = vec![w.clone()];
                for (i, &k) in exp.path.iter().enumerate() {
                    frames.push(frames[i].flip(k).unwrap());
                    wchain.push(flip_string_detailed(&wchain[i], &frames[i].tri, k).unwrap().word);
                }
                let arc = wchain.last().unwrap().at_arc().unwrap();
                let mut we = qcluster_core::expansion::WeightedExpansion::trivial(arc, frame.m());
                for i in (0..exp.path.len()).rev() {
                    for k2 in 0..frames[i + 1].tri.n_internal() {
                        match qcluster_core::expansion::constructed_pair(&we.word, &we.index, &frames[i + 1], k2) {
                            Ok((_, _, segs)) => {
                                for s in &segs {
                                    *tags.entry(s.tag).or_default() += 1;
                                }
                            }
                            Err(e) => println!("  sweep analyze failed at k={k2}: {e}"),
                        }
                    }
                    let res = transport_weights(&we, &frames[i + 1], exp.path[i]).unwrap();
                    we = res.we;
                }
                for k2 in 0..frame.tri.n_internal() {
                    match qcluster_core::expansion::constructed_pair(&we.word, &we.index, &frame, k2) {
                        Ok((_, _, segs)) => {
                            for s in &segs {
                                *tags.entry(s.tag).or_default() += 1;
                            }
                        }
                        Err(e) => println!("  sweep analyze failed at k={k2}: {e}"),
                    }
                }
            }
            let elem = expansion_element(&exp.we, &frame.seed).unwrap();
            let oracle = if exp.path.is_empty() {
                frame.seed.variables[w.at_arc().unwrap()].clone()
            } else {
                variable_along_path(&frame.seed, &exp.path, *exp.path.last().unwrap()).unwrap()
            };
            checked += 1;
            if elem != oracle {
                mismatches += 1;
                if mismatches <= 3 {
                    println!("  MISMATCH {name} word '{}'", w.to_text());
                    println!("    exp:    {elem}");
                    println!("    oracle: {oracle}");
                }
            } else if !elem.all_coefficients_nonnegative() {
                println!("  NEGATIVE {name} '{}'", w.to_text());
            }
        }
        println!(
            "{name}: {} arc words (≤6 crossings), {checked} checked, {mismatches} mismatches, {:.1}s",
            words.len(),
            start.elapsed().as_secs_f64()
        );
    }
    println!("tags seen: {tags:?}");
}
