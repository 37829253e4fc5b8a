use weakstrat::analysis::stats::{correlation, mean, sample_variance};
use weakstrat::analysis::{ks_critical_001, ks_statistic};
use weakstrat::experiment::{gram_check, path_samples, replicate};
use weakstrat::sampler::{read_binary, restrict, sample_bm, write_binary, write_csv, FbmSampler};
use weakstrat::{Grid, SamplingMethod, SeedPolicy};

const SEED: u64 = 4242;

fn terminals(grid: Grid, method: SamplingMethod, count: usize, stream: u64) -> Vec<f64> {
    let sampler = FbmSampler::new(grid, method).unwrap();
    replicate(count, SeedPolicy::new(SEED, stream), |s| sampler.sample(s).terminal())
}

fn within_se(xs: &[f64], target: f64, k: f64) -> bool {
    let se = (sample_variance(xs) / xs.len() as f64).sqrt();
    (mean(xs) - target).abs() < k * se
}

#[test]
fn terminal_variance_is_one_at_4096_steps() {
    let b1 = terminals(Grid::unit(4096).unwrap(), SamplingMethod::Circulant, 500, 0);
    let sq: Vec<f64> = b1.iter().map(|x| x * x).collect();
    assert!(within_se(&sq, 1.0, 4.0), "mean B(1)^2 = {}", mean(&sq));
}

#[test]
fn cholesky_and_circulant_agree_in_law() {
    let grid = Grid::unit(256).unwrap();
    let a = terminals(grid, SamplingMethod::Cholesky, 1000, 0);
    let b = terminals(grid, SamplingMethod::Circulant, 1000, 1 << 20);
    let d = ks_statistic(&a, &b);
    assert!(d < ks_critical_001(1000, 1000), "KS {d}");
}

#[test]
fn brownian_paths_have_unit_variance_and_are_independent_of_fbm() {
    let grid = Grid::unit(512).unwrap();
    let sampler = FbmSampler::new(grid, SamplingMethod::Circulant).unwrap();
    let pairs = replicate(1000, SeedPolicy::new(SEED, 7), |s| (sample_bm(grid, s).terminal(), sampler.sample(s).terminal()));
    let w: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let sq: Vec<f64> = w.iter().map(|x| x * x).collect();
    assert!(within_se(&sq, 1.0, 4.0), "mean W(1)^2 = {}", mean(&sq));
    let corr = correlation(&w, &b);
    assert!(corr.abs() < 4.0 / (1000f64).sqrt(), "corr {corr}");
}

#[test]
fn restricted_increments_have_coarse_variance() {
    let grid = Grid::unit(1024).unwrap();
    let sampler = FbmSampler::new(grid, SamplingMethod::Circulant).unwrap();
    let coarse = 128u64;
    let sq = replicate(1000, SeedPolicy::new(SEED, 11), |s| {
        let p = restrict(&sampler.sample(s), coarse).unwrap();
        assert_eq!(p.values().len(), 129);
        let v = p.values();
        (v[40] - v[39]).powi(2)
    });
    let target = (coarse as f64).recip().cbrt();
    assert!(within_se(&sq, target, 4.0), "{} vs {target}", mean(&sq));
}

#[test]
fn restrict_to_own_grid_is_identity() {
    let grid = Grid::new(64, 2.0).unwrap();
    let p = FbmSampler::new(grid, SamplingMethod::Cholesky).unwrap().sample(SeedPolicy::new(1, 1));
    assert_eq!(restrict(&p, 64).unwrap(), p);
    assert!(restrict(&p, 48).is_err());
}

#[test]
fn increment_variance_has_no_trend() {
    // window means of dB_j^2 over 16 windows of 256 steps, regressed on window index
    let grid = Grid::unit(4096).unwrap();
    let sampler = FbmSampler::new(grid, SamplingMethod::Circulant).unwrap();
    let windows = 16usize;
    let per_path = replicate(500, SeedPolicy::new(SEED, 13), |s| {
        let incs: Vec<f64> = sampler.sample(s).increments().collect();
        incs.chunks(4096 / windows).map(|w| w.iter().map(|x| x * x).sum::<f64>() / w.len() as f64).collect::<Vec<_>>()
    });
    let y: Vec<f64> = (0..windows).map(|w| per_path.iter().map(|p| p[w]).sum::<f64>() / 500.0).collect();
    let x: Vec<f64> = (0..windows).map(|w| w as f64).collect();
    let (mx, my) = (mean(&x), mean(&y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    let resid: f64 = x.iter().zip(&y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = (resid / (windows as f64 - 2.0) / sxx).sqrt();
    assert!((slope / se).abs() < 4.0, "slope {slope} se {se}");
    let dt13 = (4096f64).cbrt().recip();
    assert!((my / dt13 - 1.0).abs() < 0.02, "mean increment variance {my}");
}

#[test]
fn empirical_gram_matches_covariance_on_small_grid() {
    let paths = path_samples(Grid::unit(32).unwrap(), 2000, SeedPolicy::new(SEED, 17), SamplingMethod::Circulant).unwrap();
    let g = gram_check(&paths).unwrap();
    assert_eq!(g.entries, 32 * 33 / 2);
    assert!(g.max_z < 4.0, "{g:?}");
}

#[test]
fn sampling_is_bit_reproducible_and_exports_round_trip() {
    let grid = Grid::new(128, 1.5).unwrap();
    for method in [SamplingMethod::Cholesky, SamplingMethod::Circulant] {
        let sampler = FbmSampler::new(grid, method).unwrap();
        let seeds = SeedPolicy::new(99, 3);
        let a = sampler.sample(seeds);
        let b = sampler.sample(seeds);
        let bits = |p: &weakstrat::Path| p.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&sampler.sample(seeds.with_stream(4))));

        let mut buf = Vec::new();
        write_binary(&a, &mut buf).unwrap();
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back, a);

        let mut csv = Vec::new();
        write_csv(&a, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), grid.m() + 1);
        let last: Vec<&str> = rows[grid.m()].split(',').collect();
        assert_eq!(last[0], grid.m().to_string());
        assert_eq!(last[2].parse::<f64>().unwrap(), a.terminal());
    }
}
