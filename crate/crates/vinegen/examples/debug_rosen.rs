use vinegen::autoencoder::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let (n, p, z) = (500usize, 64usize, 4usize);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let loadings: Vec<Vec<f64>> = (0..z).map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let data: Vec<Vec<f64>> = (0..n).map(|_| {
        let t: Vec<f64> = (0..z).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (0..p).map(|j| { let s: f64 = (0..z).map(|k| t[k]*loadings[k][j]).sum(); 0.5 + 0.1*s }).collect()
    }).collect();
    let arch = Architecture { layer_dims: vec![p, z, p], hidden: Activation::Identity, output: OutputActivation::Identity };
    for (lr, epochs, batch) in [(0.01, 600, 500), (0.02, 1000, 500), (0.01, 1000, 128), (0.02, 2000, 128), (0.005, 3000, 500)] {
        let cfg = TrainConfig { learning_rate: lr, weight_decay: 0.0, epochs, batch_size: batch, seed: 2, loss: Loss::Mse, ..TrainConfig::default() };
        let t0 = std::time::Instant::now();
        let (ae, h) = train(&data, &arch, &cfg).unwrap();
        let mse = ae.evaluate_loss(&data, Loss::Mse).unwrap();
        println!("lr={lr} epochs={epochs} batch={batch}: final MSE {mse:.3e} (epoch200: {:.3e}) [{:?}]", h[199.min(h.len()-1)], t0.elapsed());
    }
}
