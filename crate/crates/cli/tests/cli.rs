use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Duration;

use jsonschema::JSONSchema;
use serde_json::Value;
use tempfile::TempDir;

use droneid::frames::{
    to_detection_record, Angle, Coordinate, DroneIdFrame, FlightInfoV2, GpsClock, Height, SourceType, Speed,
    RECORD_KEYS,
};
use droneid::iq::{write_file, SampleFormat};
use droneid::synth::{build_capture, Impairments};
use droneid::wifi::{build_beacon, write_pcap, CapturedFrame, LinkType};

const SCHEMA: &str = include_str!("../../../schema/detection_record.schema.json");
const REFERENCE_HEX: &str = include_str!("fixtures/reference_v2.hex");

fn droneid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_droneid"))
        .args(args)
        .env_remove("DRONEID_THRESHOLD")
        .env_remove("DRONEID_FORMAT")
        .env_remove("DRONEID_LOG")
        .env_remove("DRONEID_SAMPLE_RATE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn assert_schema_valid(record: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(record) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("record fails schema: {msgs:?}\n{record}");
    };
}

fn sample_frame() -> DroneIdFrame {
    DroneIdFrame::FlightInfoV2(FlightInfoV2 {
        sequence_num: 119,
        state_info: 0xf71f,
        serial: "0M6SYNTHSERIAL01".into(),
        drone_lon: Coordinate(-16_746_330),
        drone_lat: Coordinate(6_309_706),
        altitude: 285,
        height: Height(610),
        x_speed: Speed(2),
        y_speed: Speed(3),
        z_speed: Speed(-15),
        yaw: Angle(7478),
        pilot_gps_clock: GpsClock(1_573_423_763_012),
        pilot_lat: Coordinate(6_309_343),
        pilot_lon: Coordinate(-16_747_745),
        home_lon: Coordinate(-16_747_744),
        home_lat: Coordinate(6_309_343),
        model_id: 41,
        uuid: "SYNTHETIC-UUID-0019".into(),
    })
}

fn write_frame_json(dir: &Path, frames: &[DroneIdFrame]) -> String {
    let path = dir.join("frame.json");
    fs::write(&path, serde_json::to_string_pretty(frames).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn synth_then_detect_round_trips() {
    let dir = TempDir::new().unwrap();
    let frame = sample_frame();
    let json = write_frame_json(dir.path(), std::slice::from_ref(&frame));
    let capture = dir.path().join("burst.fc32");
    let out = droneid(&["synth", "--frame", &json, "--out", capture.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let log = dir.path().join("log.jsonl");
    let args = ["detect", "--input", capture.to_str().unwrap(), "--log", log.to_str().unwrap()];
    let out = droneid(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    let expected = serde_json::to_string(&to_detection_record(&frame, SourceType::OcuSync)).unwrap();
    assert_eq!(stdout(&out).trim_end(), expected);
    let keys: Vec<&str> = recs[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, RECORD_KEYS);
    assert_schema_valid(&recs[0]);

    // Re-running appends an identical line.
    let again = droneid(&args);
    assert_eq!(stdout(&again), stdout(&out));
    let logged = fs::read_to_string(&log).unwrap();
    let lines: Vec<&str> = logged.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
    assert_eq!(lines[0], stdout(&out).trim_end());
}

#[test]
fn impaired_cs8_capture_with_several_bursts() {
    let dir = TempDir::new().unwrap();
    let mut frames = vec![sample_frame()];
    if let DroneIdFrame::FlightInfoV2(f) = &mut frames[0].clone() {
        f.sequence_num = 120;
        frames.push(DroneIdFrame::FlightInfoV2(f.clone()));
    }
    let json = write_frame_json(dir.path(), &frames);
    let capture = dir.path().join("multi.cs8");
    let out = droneid(&[
        "synth", "--frame", &json, "--out", capture.to_str().unwrap(), "--cfo", "5000", "--snr", "25", "--seed", "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = droneid(&["detect", "--input", capture.to_str().unwrap(), "--center-freq", "2414.5e6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let seqs: Vec<u64> = recs.iter().map(|r| r["sequence_num"].as_u64().unwrap()).collect();
    assert_eq!(seqs, [119, 120]);
    recs.iter().for_each(assert_schema_valid);
}

#[test]
fn synth_accepts_hex_blocks() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("hex.json");
    fs::write(&json, serde_json::json!({ "hex": REFERENCE_HEX }).to_string()).unwrap();
    let capture = dir.path().join("hex.fc32");
    let out = droneid(&["synth", "--frame", json.to_str().unwrap(), "--out", capture.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = droneid(&["detect", "--input", capture.to_str().unwrap(), "--format", "fc32"]);
    assert_eq!(records(&out)[0]["serial_num"], "0M6SYNTHSERIAL01");
}

#[test]
fn noise_only_capture_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("noise.fc32");
    let imp = Impairments { snr_db: Some(0.0), pad_samples: 100_000, ..Default::default() };
    write_file(&path, &build_capture(&[], &imp).unwrap(), SampleFormat::Fc32).unwrap();
    let out = droneid(&["detect", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let odd = dir.path().join("odd.cs8");
    fs::write(&odd, [1u8, 2, 3]).unwrap();
    assert_eq!(droneid(&["detect", "--input", odd.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.fc32");
    assert_eq!(droneid(&["detect", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
    let unknown = dir.path().join("capture.bin");
    fs::write(&unknown, [0u8; 8]).unwrap();
    assert_eq!(droneid(&["detect", "--input", unknown.to_str().unwrap()]).status.code(), Some(2));

    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{\"type\": \"flight_info_v9\"}").unwrap();
    let out_path = dir.path().join("x.fc32");
    let out = droneid(&["synth", "--frame", bad_json.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn flags_override_environment() {
    let dir = TempDir::new().unwrap();
    let json = write_frame_json(dir.path(), &[sample_frame()]);
    let capture = dir.path().join("env.fc32");
    assert!(droneid(&["synth", "--frame", &json, "--out", capture.to_str().unwrap()]).status.success());
    let run = |env: &str, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_droneid"));
        cmd.args(["detect", "--input", capture.to_str().unwrap()]).args(extra).env("DRONEID_THRESHOLD", env);
        cmd.output().unwrap().status.code()
    };
    assert_eq!(run("1.5", &[]), Some(2));
    assert_eq!(run("1.5", &["--threshold", "0.3"]), Some(0));
    assert_eq!(run("0.3", &[]), Some(0));
}

#[test]
fn parse_reference_frame() {
    let dir = TempDir::new().unwrap();
    let hex = dir.path().join("frame.hex");
    fs::write(&hex, REFERENCE_HEX).unwrap();
    let out = droneid(&["parse", "--hex", hex.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_schema_valid(&rec);
    let expected = serde_json::json!({
        "model": "Mavic 2",
        "source_type": "OcuSync (SDR)",
        "packet_length": 94,
        "packet_type": "DroneID v2",
        "sequence_num": 119,
        "state_info": "0xf71f",
        "altitude": 285,
        "height": 61.0,
        "x_speed": 0.02,
        "y_speed": 0.03,
        "z_speed": -0.15,
        "yaw": 254.78,
        "pilot_gps_clock": 1573423763.012,
        "uuid_len": 19,
    });
    for (k, v) in expected.as_object().unwrap() {
        assert_eq!(&rec[k], v, "{k}");
    }
    let close = |k: &str, want: f64, tol: f64| {
        let got = rec[k].as_f64().unwrap();
        assert!((got - want).abs() <= tol, "{k}: {got} vs {want}");
    };
    close("total_speed", 0.15427248620541512, 1e-12);
    close("drone_longitude", -95.94940313333159, 1e-6);
    close("drone_latitude", 36.15195237683726, 1e-6);
    close("pilot_longitude", -95.95751048613268, 1e-6);
    close("pilot_latitude", 36.14987254004094, 1e-6);
    close("home_longitude", -95.95750475655475, 1e-6);
    close("home_latitude", 36.14987254004094, 1e-6);

    let bad = dir.path().join("bad.hex");
    fs::write(&bad, "zz").unwrap();
    assert_eq!(droneid(&["parse", "--hex", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, "99 00 00").unwrap();
    assert_eq!(droneid(&["parse", "--hex", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn lookup_hopplan_ppm() {
    let out = droneid(&["lookup", "1SC0123456789"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["model"], "Mavic Mini");
    assert_eq!(droneid(&["lookup", "ZZZ999"]).status.code(), Some(1));

    let plan: Vec<f64> = serde_json::from_str(&stdout(&droneid(&["hopplan", "2.4"]))).unwrap();
    assert_eq!(plan.len(), 6);
    assert_eq!(plan[0], 2399.5e6);
    let plan: Vec<f64> = serde_json::from_str(&stdout(&droneid(&["hopplan", "5.8"]))).unwrap();
    assert_eq!(plan.len(), 7);
    assert_eq!(*plan.last().unwrap(), 5831.5e6);
    assert!(plan.windows(2).all(|w| w[1] - w[0] == 15e6));
    assert_eq!(droneid(&["hopplan", "900"]).status.code(), Some(2));

    let ppm = |c: &str| stdout(&droneid(&["ppm", c])).trim().parse::<f64>().unwrap();
    assert_eq!(ppm("1.0"), 0.0);
    assert_eq!(ppm("0.999999"), 1.0);
    assert_eq!(ppm("1.000005"), -5.0);
    assert_eq!(droneid(&["ppm", "1.5"]).status.code(), Some(2));
}

#[test]
fn wifi_pcap_with_dji_beacon() {
    let dir = TempDir::new().unwrap();
    let packet = sample_frame().to_packet().unwrap();
    let beacon = build_beacon([0x60, 0x60, 0x1F, 1, 2, 3], "DJI-drone", Some(&packet)).unwrap();
    let plain = build_beacon([0x00, 0x11, 0x22, 1, 2, 3], "cafe", None).unwrap();
    let frames = [plain, beacon]
        .into_iter()
        .enumerate()
        .map(|(i, data)| CapturedFrame { timestamp: Duration::from_millis(i as u64 * 100), data })
        .collect::<Vec<_>>();
    for link in [LinkType::Ieee80211, LinkType::Radiotap] {
        let path = dir.path().join("beacons.pcap");
        fs::write(&path, write_pcap(Vec::new(), link, &frames).unwrap()).unwrap();
        let out = droneid(&["wifi", "--pcap", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let recs = records(&out);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0]["source_type"], "Enhanced Wi-Fi");
        assert_eq!(recs[0]["serial_num"], "0M6SYNTHSERIAL01");
        assert_schema_valid(&recs[0]);
    }
    let empty = dir.path().join("empty.pcap");
    fs::write(&empty, write_pcap(Vec::new(), LinkType::Ieee80211, &[]).unwrap()).unwrap();
    assert_eq!(droneid(&["wifi", "--pcap", empty.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(droneid(&["wifi", "--pcap", "/nonexistent.pcap"]).status.code(), Some(2));
}

#[test]
fn schema_rejects_incomplete_records() {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = JSONSchema::compile(&schema).unwrap();
    let mut rec = serde_json::to_value(to_detection_record(&sample_frame(), SourceType::OcuSync)).unwrap();
    assert!(compiled.is_valid(&rec));
    rec.as_object_mut().unwrap().remove("uuid");
    assert!(!compiled.is_valid(&rec));
}
