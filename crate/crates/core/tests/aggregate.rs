use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snep_core::*;

fn stored(n_r: usize, n_s: usize) -> StepSolution64 {
    let inst = benchmark::stochastic::<f64>();
    let grid = Grid::new(&inst, &GridSpec::new(5, n_r, n_s)).unwrap();
    solve_all(&inst, &grid, &SolverConfig::default(), &SweepOptions::default()).unwrap()
}

fn streamed(n_r: usize, n_s: usize) -> MomentReport64 {
    let inst = benchmark::stochastic::<f64>();
    let grid = Grid::new(&inst, &GridSpec::new(5, n_r, n_s)).unwrap();
    solve_streaming(&inst, &grid, &SolverConfig::default(), &SweepOptions::default())
        .unwrap()
        .moments
}

#[test]
fn shuffling_cells_keeps_the_mean() {
    let sol = stored(40, 400);
    let report = expectation(&sol);
    let mut order: Vec<usize> = (0..sol.cell_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(4));
    let mut acc = MomentAccumulator::new(5);
    for &c in &order {
        acc.add(sol.weight(c), sol.solution(c));
    }
    let shuffled = acc.finish();
    for i in 0..5 {
        assert!((shuffled.mean[i] - report.mean[i]).abs() < 1e-12);
    }
    assert!((report.total_weight - 1.0).abs() < 1e-9);
}

#[test]
fn means_stay_within_bounds() {
    let report = streamed(20, 200);
    for (&m, &v) in report.mean.iter().zip(&report.variance) {
        assert!((0.0..=100.0).contains(&m));
        assert!(v >= -1e-12);
    }
}

#[test]
fn published_rows_differences() {
    let level = |row: [f64; 5], cells: Vec<usize>| {
        let mut acc = MomentAccumulator::new(5);
        acc.add(1.0, &row);
        LadderLevel { cells, report: acc.finish() }
    };
    let rows = convergence_report(&[
        level(snep_validation::PUBLISHED_MEAN_200, vec![200, 20_000]),
        level(snep_validation::PUBLISHED_MEAN_400, vec![400, 40_000]),
    ])
    .unwrap();
    let want = [0.0275, 0.0313, 0.0328, 0.0322, 0.0296];
    for i in 0..5 {
        assert!((rows[0].delta[i] - want[i]).abs() < 1e-9);
    }
    assert!((rows[0].max_delta - 0.0328).abs() < 1e-9);
}

#[test]
fn ladder_differences_shrink() {
    let levels: Vec<LadderLevel<f64>> = [(50, 500), (100, 1000), (200, 2000)]
        .iter()
        .map(|&(r, s)| LadderLevel { cells: vec![r, s], report: streamed(r, s) })
        .collect();
    let rows = convergence_report(&levels).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].max_delta < rows[0].max_delta, "{rows:?}");
    let mut buf = Vec::new();
    write_convergence_csv(&rows, &["r", "s"], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("level,n_r,n_s,delta_1,delta_2,delta_3,delta_4,delta_5,max_delta\n1,100,1000,"));
    assert_eq!(text.lines().count(), 3);
}
