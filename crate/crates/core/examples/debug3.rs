use qcluster_core::expansion::*;
use qcluster_core::strings::{flip_string_detailed, StringWord};
use qcluster_core::surface::Triangulation;

fn main() {
    let t0 = Triangulation::new(3, 3, vec![[1, 3, 0], [5, 2, 1], [0, 4, 2]]).unwrap();
    let frame = Frame::initial(t0.clone()).unwrap();
    // replicate: find the failing instance by sweeping every arc word's chain
    let words = {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<Triangulation>, Vec<usize>)> = vec![(vec![t0.clone()], Vec::new())];
        while let Some((tris, path)) = stack.pop() {
            let t = tris.last().unwrap().clone();
            for j in 0..t.n_internal() {
                let mut w = StringWord::empty_at(j);
                for i in (0..path.len()).rev() {
                    w = flip_string_detailed(&w, &tris[i + 1], path[i]).unwrap().word;
                }
                let w = w.canonical();
                if w.len() <= 6 && seen.insert(w.to_text()) {
                    out.push(w);
                }
            }
            if path.len() < 8 {
                for k in 0..t.n_internal() {
                    if path.last() == Some(&k) { continue; }
                    let mut t2 = tris.clone();
                    t2.push(t.flip(k).unwrap());
                    let mut p2 = path.clone();
                    p2.push(k);
                    stack.push((t2, p2));
                }
            }
        }
        out
    };
    'words: for w in &words {
        let exp = compute_expansion(&frame, w, 3000).unwrap();
        let mut frames = vec![frame.clone()];
        let mut wchain = vec![w.clone()];
        for (i, &k) in exp.path.iter().enumerate() {
            frames.push(frames[i].flip(k).unwrap());
            wchain.push(flip_string_detailed(&wchain[i], &frames[i].tri, k).unwrap().word);
        }
        let arc = wchain.last().unwrap().at_arc().unwrap();
        let mut we = WeightedExpansion::trivial(arc, frame.m());
        for i in (0..exp.path.len()).rev() {
            for k2 in 0..frames[i + 1].tri.n_internal() {
                if let Err(e) = transport_weights(&we, &frames[i + 1], k2) {
                    println!("WORD {} step {} sweep k={k2}: {e}", w.to_text(), i);
                    println!("  we.word = {}", we.word.to_text());
                    println!("  we.index = {:?}", we.index);
                    for (m, v) in &we.weights { println!("  carried[{m:#b}] = {v}"); }
                    // tiles of that flip
                    let out = flip_string_detailed(&we.word, &frames[i+1].tri, k2).unwrap();
                    println!("  new word = {}", out.word.to_text());
                    for t in &out.tiles { println!("  tile {:?} old {:?} new {:?}", t.tag, t.old, t.new); }
                    break 'words;
                }
            }
            we = transport_weights(&we, &frames[i + 1], exp.path[i]).unwrap().we;
        }
        for k2 in 0..frame.tri.n_internal() {
            if let Err(e) = transport_weights(&we, &frame, k2) {
                println!("WORD {} FINAL sweep k={k2}: {e}", w.to_text());
                println!("  we.word = {}", we.word.to_text());
                println!("  we.index = {:?}", we.index);
                for (m, v) in &we.weights { println!("  carried[{m:#b}] = {v}"); }
                let out = flip_string_detailed(&we.word, &frame.tri, k2).unwrap();
                println!("  new word = {}", out.word.to_text());
                for t in &out.tiles { println!("  tile {:?} old {:?} new {:?}", t.tag, t.old, t.new); }
                break 'words;
            }
        }
    }
}
