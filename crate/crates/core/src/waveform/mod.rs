//! Excitation waveforms and echo synthesis through the acoustic link.

mod channel;
mod excitation;
mod noise;
mod scenario;
mod trace;

pub use channel::{synthesize_echo, LinkChannel, SynthesizedEcho, DEFAULT_SAMPLE_RATE, ECHO_TAIL};
pub use excitation::{burst_cycles, make_burst, make_chirp, MIN_OVERSAMPLING};
pub use noise::{add_noise, add_noise_stream, gated_power, substream};
pub use scenario::{BoundaryEcho, InterrogatorBand, LinkScenario, NoiseSpec, Reflector};
pub use trace::EchoTrace;
