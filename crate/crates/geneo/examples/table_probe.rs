// Scratch probe: full-scale dice run, both methods, PC counts 1-4.
use geneo::dice::classifier::{evaluate, train_classifier, TrainParams};
use geneo::dice::experiment::stratified_split;
use geneo::dice::lattice::build_cube_group_and_permutants;
use geneo::dice::pca::pca_fit;
use geneo::dice::sample::{generate_dataset, DieGenerator};
use geneo::dice::surface_op::build_geneo;
use std::time::Instant;

fn main() {
    let n = 25;
    let count = 10_000;
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t0 = Instant::now();
    let generator = DieGenerator::new(n, (0.6, 1.0)).unwrap();
    let data = generate_dataset(&generator, count, seed).unwrap();
    eprintln!("generate: {:?}", t0.elapsed());

    let t1 = Instant::now();
    let sym = build_cube_group_and_permutants(n).unwrap();
    let op = build_geneo(&sym, [0.318, 0.551, 0.131]).unwrap();
    let transformed = op.apply_dataset(&data).unwrap();
    eprintln!("geneo: {:?}", t1.elapsed());

    let labels: Vec<u8> = data.iter().map(|d| d.label).collect();
    let (train_idx, test_idx) = stratified_split(&labels, seed);

    for (name, samples) in [("raw", &data), ("geneo", &transformed)] {
        let t2 = Instant::now();
        let matrix: Vec<Vec<f32>> = samples.iter().map(|d| d.surface_values.clone()).collect();
        let pca = match pca_fit(&matrix, 4) {
            Ok(p) => p,
            Err(e) => { eprintln!("{name}: PCA failed: {e}"); continue; }
        };
        eprintln!("{name}: pca {:?} ev={:?}", t2.elapsed(), pca.explained_variance);
        let projected: Vec<Vec<f64>> = matrix.iter().map(|r| pca.project(r, 4)).collect();
        for pcs in 1..=4usize {
            let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
                (idx.iter().map(|&i| projected[i][..pcs].to_vec()).collect(),
                 idx.iter().map(|&i| labels[i]).collect())
            };
            let (tr_rows, tr_labels) = gather(&train_idx);
            let (te_rows, te_labels) = gather(&test_idx);
            let clf = train_classifier(&tr_rows, &tr_labels, TrainParams { shuffle_seed: seed ^ 0x7aa1_9e0d_c1a5_5ee1, ..TrainParams::default() }).unwrap();
            let tr = evaluate(&clf, &tr_rows, &tr_labels).accuracy();
            let te = evaluate(&clf, &te_rows, &te_labels).accuracy();
            println!("{name} pcs={pcs}: train={tr:.3} test={te:.3}");
        }
    }
    eprintln!("total: {:?}", t0.elapsed());
}
