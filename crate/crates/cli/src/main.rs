use std::fs::{self, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use droneid::burst::DEFAULT_THRESHOLD;
use droneid::fec::{block_residual, seal_block, Block, BLOCK_BYTES, CONTENT_BYTES};
use droneid::frames::{model_lookup, parse_packet, to_detection_record, DetectionRecord, DroneIdFrame, SourceType};
use droneid::frontend::ppm_from_correction;
use droneid::hop::{Band, HopPlan};
use droneid::iq::{self, IqBuffer, SampleFormat};
use droneid::layout::{BURST_LEN, SAMPLE_RATE};
use droneid::pipeline::Receiver;
use droneid::synth::{build_capture, Impairments};
use droneid::wifi;

const EXIT_FOUND: u8 = 0;
const EXIT_NONE: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

/// Default cs8 amplitude: RMS of 32 keeps OFDM peaks inside the 8-bit range.
const CS8_AMPLITUDE: f64 = 32.0;

#[derive(Parser)]
#[command(name = "droneid", version, about = "DJI drone-ID detector, synthesizer and frame parser")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect and decode drone-ID bursts in an IQ capture
    Detect {
        #[arg(long, env = "DRONEID_INPUT")]
        input: PathBuf,
        /// Sample format; inferred from the file extension when omitted
        #[arg(long, env = "DRONEID_FORMAT")]
        format: Option<SampleFormat>,
        /// Tuner center frequency in Hz (reported on stderr)
        #[arg(long, env = "DRONEID_CENTER_FREQ")]
        center_freq: Option<f64>,
        /// Normalized correlation threshold in (0, 1)
        #[arg(long, env = "DRONEID_THRESHOLD", default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Append records to this JSONL file
        #[arg(long, env = "DRONEID_LOG")]
        log: Option<PathBuf>,
        #[arg(long, env = "DRONEID_SAMPLE_RATE", default_value_t = SAMPLE_RATE)]
        sample_rate: f64,
    },
    /// Write a capture containing synthesized bursts
    Synth {
        /// JSON frame description, an array of them, or {"hex": "..."}
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "DRONEID_FORMAT")]
        format: Option<SampleFormat>,
        /// Carrier frequency offset in Hz
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        cfo: f64,
        /// In-band SNR in dB; noiseless when omitted
        #[arg(long, allow_negative_numbers = true)]
        snr: Option<f64>,
        /// RMS sample amplitude (default 1.0 for fc32, 32 for cs8)
        #[arg(long)]
        amplitude: Option<f64>,
        /// Zero samples before, between and after bursts
        #[arg(long, default_value_t = 5000)]
        pad: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parse a hex-encoded packet or 96-byte decoded block
    Parse {
        /// File holding hex digits; whitespace is ignored. `-` reads stdin.
        #[arg(long)]
        hex: PathBuf,
        #[arg(long, value_enum, default_value = "ocusync")]
        source: Source,
    },
    /// Look up a DJI model by serial-number prefix
    Lookup { serial: String },
    /// Print the hop-plan center frequencies (Hz) for a band
    Hopplan { band: Band },
    /// Convert a crystal correction factor to PPM
    Ppm {
        #[arg(allow_negative_numbers = true)]
        correction: f64,
    },
    /// Extract drone-ID records from 802.11 beacons in a pcap file
    Wifi {
        #[arg(long)]
        pcap: PathBuf,
        #[arg(long, env = "DRONEID_LOG")]
        log: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Source {
    Ocusync,
    Wifi,
}

/// Serializes record output so lines are never interleaved.
struct RecordSink {
    stdout: io::StdoutLock<'static>,
    log: Option<BufWriter<fs::File>>,
}

impl RecordSink {
    fn open(log: Option<&Path>) -> Result<Self> {
        let log = log
            .map(|p| {
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .with_context(|| format!("opening log {}", p.display()))
                    .map(BufWriter::new)
            })
            .transpose()?;
        Ok(Self { stdout: io::stdout().lock(), log })
    }

    fn emit(&mut self, record: &DetectionRecord) -> Result<()> {
        let line = serde_json::to_string(record)?;
        writeln!(self.stdout, "{line}")?;
        if let Some(log) = &mut self.log {
            writeln!(log, "{line}")?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.stdout.flush()?;
        if let Some(log) = &mut self.log {
            log.flush()?;
        }
        Ok(())
    }
}

fn resolve_format(explicit: Option<SampleFormat>, path: &Path) -> Result<SampleFormat> {
    explicit
        .or_else(|| SampleFormat::from_path(path))
        .ok_or_else(|| anyhow!("cannot infer sample format of {}; pass --format cs8|fc32", path.display()))
}

fn warn_implausible(frame: &DroneIdFrame, whence: &str) {
    let fields = frame.implausible_fields();
    if !fields.is_empty() {
        eprintln!("warning: {whence}: implausible {}", fields.join(", "));
    }
}

fn cmd_detect(
    input: &Path,
    format: Option<SampleFormat>,
    center_freq: Option<f64>,
    threshold: f64,
    log: Option<&Path>,
    sample_rate: f64,
) -> Result<u8> {
    let format = resolve_format(format, input)?;
    let capture = iq::read_file(input, format)
        .with_context(|| format!("reading {}", input.display()))?
        .with_sample_rate(sample_rate)?
        .with_center_freq(center_freq);
    let rx = Receiver::new(threshold, sample_rate)?;
    let bursts = rx.find_bursts(&capture)?;
    let outcomes: Vec<_> = bursts.par_iter().map(|b| rx.decode_burst(&capture, b)).collect();

    let mut sink = RecordSink::open(log)?;
    let mut found = 0;
    for outcome in &outcomes {
        match &outcome.result {
            Ok(d) => {
                warn_implausible(&d.frame, &format!("burst at {}", d.start_index));
                match center_freq {
                    // An offset observed at the tuner maps to a crystal correction factor.
                    Some(fc) if fc > 0.0 => eprintln!(
                        "burst at {}: cfo {:.0} Hz, correction {:.9}",
                        d.start_index,
                        d.cfo_hz,
                        1.0 + d.cfo_hz / fc
                    ),
                    _ => eprintln!("burst at {}: cfo {:.0} Hz", d.start_index, d.cfo_hz),
                }
                sink.emit(&d.record)?;
                found += 1;
            }
            Err(e) => eprintln!("burst at {} (score {:.2}): {e}", outcome.start_index, outcome.score),
        }
    }
    sink.finish()?;
    let tuned = center_freq.map(|f| format!(" at {:.1} MHz", f / 1e6)).unwrap_or_default();
    eprintln!("{} bursts{tuned}, {found} decoded", outcomes.len());
    Ok(if found > 0 { EXIT_FOUND } else { EXIT_NONE })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FrameInput {
    Hex { hex: String },
    Frame(DroneIdFrame),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FrameFile {
    Many(Vec<FrameInput>),
    One(FrameInput),
}

fn decode_hex(text: &str) -> Result<Vec<u8>> {
    let digits: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    hex::decode(&digits).context("invalid hex")
}

fn input_block(input: FrameInput) -> Result<Block> {
    match input {
        FrameInput::Frame(frame) => Ok(frame.to_block()?),
        FrameInput::Hex { hex } => {
            let bytes = decode_hex(&hex)?;
            match bytes.len() {
                CONTENT_BYTES => Ok(seal_block(&bytes)?),
                BLOCK_BYTES => {
                    let block: Block = bytes.try_into().expect("length checked");
                    if block_residual(&block) != 0 {
                        bail!("hex block fails its CRC-24");
                    }
                    Ok(block)
                }
                n => bail!("hex frame must be {CONTENT_BYTES} or {BLOCK_BYTES} bytes, got {n}"),
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    frame: &Path,
    out: &Path,
    format: Option<SampleFormat>,
    cfo: f64,
    snr: Option<f64>,
    amplitude: Option<f64>,
    pad: usize,
    seed: u64,
) -> Result<u8> {
    let format = resolve_format(format, out)?;
    let text = fs::read_to_string(frame).with_context(|| format!("reading {}", frame.display()))?;
    let inputs = match serde_json::from_str::<FrameFile>(&text).context("invalid frame JSON")? {
        FrameFile::Many(v) => v,
        FrameFile::One(s) => vec![s],
    };
    if inputs.is_empty() {
        bail!("frame file lists no frames");
    }
    let bursts = inputs
        .into_iter()
        .enumerate()
        .map(|(i, s)| Ok((input_block(s)?, pad + i * (BURST_LEN + pad))))
        .collect::<Result<Vec<_>>>()?;
    let amplitude = amplitude.unwrap_or(match format {
        SampleFormat::Cs8 => CS8_AMPLITUDE,
        SampleFormat::Fc32 => 1.0,
    });
    let imp = Impairments { cfo_hz: cfo, snr_db: snr, amplitude, pad_samples: pad, seed };
    let capture: IqBuffer = build_capture(&bursts, &imp)?;
    iq::write_file(out, &capture, format).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} bursts, {} samples ({format}) to {}", bursts.len(), capture.len(), out.display());
    Ok(EXIT_FOUND)
}

fn cmd_parse(hex_path: &Path, source: Source) -> Result<u8> {
    let text = if hex_path == Path::new("-") {
        io::read_to_string(io::stdin())?
    } else {
        fs::read_to_string(hex_path).with_context(|| format!("reading {}", hex_path.display()))?
    };
    let bytes = decode_hex(&text)?;
    if bytes.len() == BLOCK_BYTES && block_residual(&bytes) != 0 {
        eprintln!("warning: CRC-24 residual {:#08x}; parsing anyway", block_residual(&bytes));
    }
    let frame = parse_packet(&bytes)?;
    warn_implausible(&frame, "packet");
    let source = match source {
        Source::Ocusync => SourceType::OcuSync,
        Source::Wifi => SourceType::EnhancedWifi,
    };
    println!("{}", serde_json::to_string_pretty(&to_detection_record(&frame, source))?);
    Ok(EXIT_FOUND)
}

fn cmd_lookup(serial: &str) -> Result<u8> {
    let hit = model_lookup(serial);
    println!("{}", serde_json::to_string(&hit)?);
    Ok(if hit.is_some() { EXIT_FOUND } else { EXIT_NONE })
}

fn cmd_wifi(pcap: &Path, log: Option<&Path>) -> Result<u8> {
    let file = fs::File::open(pcap).with_context(|| format!("opening {}", pcap.display()))?;
    let frames = wifi::read_pcap(io::BufReader::new(file))?;
    let mut sink = RecordSink::open(log)?;
    let mut found = 0;
    for (i, captured) in frames.iter().enumerate() {
        let obs = match wifi::observe(&captured.data) {
            Ok(Some(obs)) => obs,
            Ok(None) => continue,
            Err(e) => {
                eprintln!("frame {i}: {e}");
                continue;
            }
        };
        match obs.record {
            Some(Ok(record)) => {
                sink.emit(&record)?;
                found += 1;
            }
            Some(Err(e)) => eprintln!("frame {i}: drone-ID payload: {e}"),
            None => {
                if let Some(vendor) = obs.vendor {
                    let mac: Vec<String> = obs.sender.iter().map(|b| format!("{b:02x}")).collect();
                    eprintln!("frame {i}: {vendor} beacon from {} without drone-ID element", mac.join(":"));
                }
            }
        }
    }
    sink.finish()?;
    Ok(if found > 0 { EXIT_FOUND } else { EXIT_NONE })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Detect { input, format, center_freq, threshold, log, sample_rate } => {
            cmd_detect(&input, format, center_freq, threshold, log.as_deref(), sample_rate)
        }
        Command::Synth { frame, out, format, cfo, snr, amplitude, pad, seed } => {
            cmd_synth(&frame, &out, format, cfo, snr, amplitude, pad, seed)
        }
        Command::Parse { hex, source } => cmd_parse(&hex, source),
        Command::Lookup { serial } => cmd_lookup(&serial),
        Command::Hopplan { band } => {
            println!("{}", serde_json::to_string(&HopPlan::for_band(band).center_frequencies)?);
            Ok(EXIT_FOUND)
        }
        Command::Ppm { correction } => {
            // Rounded to 1e-6 ppm to hide binary round-off in 1 - c.
            let ppm = (ppm_from_correction(correction)? * 1e6).round() / 1e6;
            println!("{}", serde_json::to_string(&ppm)?);
            Ok(EXIT_FOUND)
        }
        Command::Wifi { pcap, log } => cmd_wifi(&pcap, log.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
