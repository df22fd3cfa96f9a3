use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based random streams: one independent ChaCha stream per pulse
/// index under a key derived from the master seed, so a pulse's draws do
/// not depend on which worker simulates it or in which order.
#[derive(Debug, Clone)]
pub struct PulseRng {
    base: ChaCha8Rng,
}

impl PulseRng {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_pulse(&self, pulse_index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(pulse_index);
        rng.set_word_pos(0);
        rng
    }
}
