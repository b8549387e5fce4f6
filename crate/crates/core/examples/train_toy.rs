//! Train the default network on a toy bars task with the stock schedule
//! (20 epochs, batches of 30, lr 0.001) and report training accuracy.

use protview::cnn::{accuracy, bars_dataset, train, NetworkSpec, Shape, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = bars_dataset(900, 16, 1);
    let spec = NetworkSpec::desk_default(Shape::new(3, 16, 16), 2);
    let config = TrainConfig::default();
    println!("{}", toml::to_string(&config)?);
    let outcome = train(&samples, &spec, &config)?;
    for (epoch, loss) in outcome.loss_history.iter().enumerate() {
        println!("epoch {:>2}  loss {loss:.5}", epoch + 1);
    }
    println!("training accuracy {:.3}", accuracy(&outcome.network, &samples)?);
    Ok(())
}
