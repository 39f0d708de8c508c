use qcluster_core::expansion::*;
use qcluster_core::index::index_of;
use qcluster_core::strings::{chord_word, flip_string_detailed, find_flip_path, canonical_submodules, dim_vector};
use qcluster_core::surface::{polygon_triangulation, quiver_of};

fn main() {
    let v = 7;
    let diags: Vec<(usize, usize)> = (2..v - 1).map(|i| (0, i)).collect();
    let (t0, model) = polygon_triangulation(v, &diags).unwrap();
    let q0 = quiver_of(&t0);
    let frame0 = Frame::initial(t0.clone()).unwrap();
    let w = chord_word(&t0, &q0, &model, (1, 6)).unwrap();
    let path = find_flip_path(&t0, &w, 2000).unwrap();
    let mut frames = vec![frame0.clone()];
    let mut words = vec![w.clone()];
    for (i, &k) in path.iter().enumerate() {
        frames.push(frames[i].flip(k).unwrap());
        words.push(flip_string_detailed(&words[i], &frames[i].tri, k).unwrap().word);
    }
    // carried truth on words[2] over frames[2] via two transports
    let arc = words.last().unwrap().at_arc().unwrap();
    let mut we = WeightedExpansion::trivial(arc, frame0.m());
    for i in (2..path.len()).rev() {
        we = transport_weights(&we, &frames[i + 1], path[i]).unwrap().we;
    }
    println!("carried word: {}", we.word.to_text());
    println!("carried index: {:?}", we.index);
    for (mask, wt) in &we.weights { println!("  carried v[{mask:#b}] = {wt}"); }

    // the failing step: frame = frames[2], k = path[1]
    let fr = &frames[2];
    let k = path[1];
    println!("flip at k={k} over T2");
    let out = flip_string_detailed(&we.word, &fr.tri, k).unwrap();
    for t in &out.tiles { println!("  tile {:?} old {:?} new {:?}", t.tag, t.old, t.new); }
    // per-tile isolation indexes
    let m = fr.m();
    for t in &out.tiles {
        let sw = we.word.subword(t.old.0, t.old.1);
        println!("  iso ind {:?} = {:?}", t.old, index_of(&sw, &fr.quiver).unwrap());
    }
    println!("  full ind = {:?}", index_of(&we.word, &fr.quiver).unwrap());
    // Λ(v, B e_j) = -v_j sanity and cross-term exploration:
    // enumerate CS and print the needed v (carried) vs candidate decompositions
    let cs = canonical_submodules(&we.word);
    let lam = fr.lambda();
    let b = &fr.seed.pair.b;
    let matvec = |d: &[i64]| -> Vec<i64> {
        let mut o = vec![0i64; m];
        for j in 0..fr.seed.n() { if d[j] != 0 { for i in 0..m { o[i] += b[i][j] * d[j]; } } }
        o
    };
    // tiles: ranges
    let r1 = out.tiles[0].old; let r2 = out.tiles[1].old;
    let w1 = we.word.subword(r1.0, r1.1); let w2 = we.word.subword(r2.0, r2.1);
    let i1 = index_of(&w1, &fr.quiver).unwrap(); let i2 = index_of(&w2, &fr.quiver).unwrap();
    let ifull = index_of(&we.word, &fr.quiver).unwrap();
    let delta: Vec<i64> = (0..m).map(|i| ifull[i] - i1[i] - i2[i]).collect();
    println!("  delta = {delta:?}");
    for dump in [0usize, 1] {
        println!("  -- dump delta into tile {dump}");
        for &mask in &cs {
            let m1 = mask & ((1 << (r1.1 - r1.0)) - 1);
            let m2 = (mask >> r2.0) & ((1 << (r2.1 - r2.0)) - 1);
            let mut g1: Vec<i64> = i1.iter().zip(matvec(&dim_vector(&w1, m1, m))).map(|(a, b)| a + b).collect();
            let mut g2: Vec<i64> = i2.iter().zip(matvec(&dim_vector(&w2, m2, m))).map(|(a, b)| a + b).collect();
            if dump == 0 { for i in 0..m { g1[i] += delta[i]; } } else { for i in 0..m { g2[i] += delta[i]; } }
            let cross = lam.eval(&g1, &g2);
            println!("    mask {mask:#05b}: cross = {cross}, carried = {}", we.weights[&mask]);
        }
    }
}
