//! Frequency responses of the coupling shaper and of its reshaping inverse.
//!
//!     cargo run --example shaper_freqresp

use eoi_force::identify::log_grid;
use eoi_force::plant::{rig_coupling, RIG_MASS};
use eoi_force::shaping::invert_shaper;

fn main() -> eoi_force::Result<()> {
    let coupling = rig_coupling();
    let s12 = coupling.to_tf()?;
    let g = invert_shaper(&coupling, RIG_MASS)?;
    println!(
        "S12: dc {:.4}, high-frequency {:.1}",
        s12.dc_gain(),
        s12.high_frequency_gain()
    );
    println!(
        "G:   dc {:.4}, high-frequency {:.3e}",
        g.dc_gain(),
        g.high_frequency_gain()
    );
    println!("G(j 1e7) magnitude {:.4e}", g.freq_response(1e7).norm());
    println!();
    println!(
        "{:>12} {:>12} {:>10} {:>12} {:>10}",
        "omega", "|S12|", "arg S12", "|G|", "arg G"
    );
    for w in log_grid(1.0, 1e6, 13) {
        let (a, b) = (s12.freq_response(w), g.freq_response(w));
        println!(
            "{w:>12.1} {:>12.4} {:>10.2} {:>12.4e} {:>10.2}",
            a.norm(),
            a.arg().to_degrees(),
            b.norm(),
            b.arg().to_degrees()
        );
    }
    Ok(())
}
