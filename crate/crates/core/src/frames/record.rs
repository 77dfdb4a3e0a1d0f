//! JSON projection of a decoded frame. Every record carries the same 23
//! keys in the same order; fields a packet type does not carry are null.

use serde::{Deserialize, Serialize};

use super::{aeroscope_model, model_lookup, DroneIdFrame, PACKET_LENGTH};

pub const RECORD_KEYS: [&str; 23] = [
    "model",
    "source_type",
    "packet_length",
    "packet_type",
    "sequence_num",
    "state_info",
    "serial_num",
    "drone_longitude",
    "drone_latitude",
    "altitude",
    "height",
    "x_speed",
    "y_speed",
    "z_speed",
    "total_speed",
    "yaw",
    "pilot_gps_clock",
    "pilot_longitude",
    "pilot_latitude",
    "home_longitude",
    "home_latitude",
    "uuid_len",
    "uuid",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceType {
    #[serde(rename = "OcuSync (SDR)")]
    OcuSync,
    #[serde(rename = "Enhanced Wi-Fi")]
    EnhancedWifi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub model: Option<String>,
    pub source_type: SourceType,
    pub packet_length: u32,
    pub packet_type: String,
    pub sequence_num: Option<u16>,
    pub state_info: Option<String>,
    pub serial_num: String,
    pub drone_longitude: Option<f64>,
    pub drone_latitude: Option<f64>,
    pub altitude: Option<i16>,
    pub height: Option<f64>,
    pub x_speed: Option<f64>,
    pub y_speed: Option<f64>,
    pub z_speed: Option<f64>,
    pub total_speed: Option<f64>,
    pub yaw: Option<f64>,
    pub pilot_gps_clock: Option<f64>,
    pub pilot_longitude: Option<f64>,
    pub pilot_latitude: Option<f64>,
    pub home_longitude: Option<f64>,
    pub home_latitude: Option<f64>,
    pub uuid_len: Option<u8>,
    pub uuid: Option<String>,
}

impl DetectionRecord {
    fn empty(source_type: SourceType, packet_type: &str, serial: &str) -> Self {
        Self {
            model: model_lookup(serial).map(|m| m.model.to_string()),
            source_type,
            packet_length: PACKET_LENGTH,
            packet_type: packet_type.to_string(),
            sequence_num: None,
            state_info: None,
            serial_num: serial.to_string(),
            drone_longitude: None,
            drone_latitude: None,
            altitude: None,
            height: None,
            x_speed: None,
            y_speed: None,
            z_speed: None,
            total_speed: None,
            yaw: None,
            pilot_gps_clock: None,
            pilot_longitude: None,
            pilot_latitude: None,
            home_longitude: None,
            home_latitude: None,
            uuid_len: None,
            uuid: None,
        }
    }
}

fn model_name(model_id: u8, serial: &str) -> Option<String> {
    aeroscope_model(model_id.into())
        .or_else(|| model_lookup(serial).map(|m| m.model))
        .map(str::to_string)
}

fn state_hex(state: u16) -> String {
    format!("{state:#06x}")
}

pub fn to_detection_record(frame: &DroneIdFrame, source_type: SourceType) -> DetectionRecord {
    match frame {
        DroneIdFrame::License(f) => DetectionRecord::empty(source_type, "DroneID license", &f.serial),
        DroneIdFrame::FlightInfoV1(f) => {
            let (x, y, z) = (f.x_speed.meters_per_second(), f.y_speed.meters_per_second(), f.z_speed.meters_per_second());
            DetectionRecord {
                model: model_name(f.model_id, &f.serial),
                sequence_num: Some(f.sequence_num),
                state_info: Some(state_hex(f.state_info)),
                drone_longitude: Some(f.drone_lon.degrees()),
                drone_latitude: Some(f.drone_lat.degrees()),
                altitude: Some(f.altitude),
                height: Some(f.height.meters()),
                x_speed: Some(x),
                y_speed: Some(y),
                z_speed: Some(z),
                total_speed: Some((x * x + y * y + z * z).sqrt()),
                yaw: Some(f.yaw.heading()),
                home_longitude: Some(f.home_lon.degrees()),
                home_latitude: Some(f.home_lat.degrees()),
                uuid_len: Some(f.uuid.len() as u8),
                uuid: Some(f.uuid.clone()),
                ..DetectionRecord::empty(source_type, "DroneID v1", &f.serial)
            }
        }
        DroneIdFrame::FlightInfoV2(f) => {
            let (x, y, z) = (f.x_speed.meters_per_second(), f.y_speed.meters_per_second(), f.z_speed.meters_per_second());
            DetectionRecord {
                model: model_name(f.model_id, &f.serial),
                sequence_num: Some(f.sequence_num),
                state_info: Some(state_hex(f.state_info)),
                drone_longitude: Some(f.drone_lon.degrees()),
                drone_latitude: Some(f.drone_lat.degrees()),
                altitude: Some(f.altitude),
                height: Some(f.height.meters()),
                x_speed: Some(x),
                y_speed: Some(y),
                z_speed: Some(z),
                total_speed: Some((x * x + y * y + z * z).sqrt()),
                yaw: Some(f.yaw.heading()),
                pilot_gps_clock: Some(f.pilot_gps_clock.seconds()),
                pilot_longitude: Some(f.pilot_lon.degrees()),
                pilot_latitude: Some(f.pilot_lat.degrees()),
                home_longitude: Some(f.home_lon.degrees()),
                home_latitude: Some(f.home_lat.degrees()),
                uuid_len: Some(f.uuid.len() as u8),
                uuid: Some(f.uuid.clone()),
                ..DetectionRecord::empty(source_type, "DroneID v2", &f.serial)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::tests::sample_v2;
    use crate::frames::{License, Speed};

    #[test]
    fn key_order_is_fixed() {
        let rec = to_detection_record(&DroneIdFrame::FlightInfoV2(sample_v2()), SourceType::OcuSync);
        let value = serde_json::to_value(&rec).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, RECORD_KEYS);
        let lic = DroneIdFrame::License(License { serial: "1SC".into(), ..Default::default() });
        let value = serde_json::to_value(to_detection_record(&lic, SourceType::EnhancedWifi)).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, RECORD_KEYS);
        assert_eq!(value["model"], "Mavic Mini");
        assert_eq!(value["source_type"], "Enhanced Wi-Fi");
        assert!(value["yaw"].is_null());
    }

    #[test]
    fn reference_record_values() {
        let rec = to_detection_record(&DroneIdFrame::FlightInfoV2(sample_v2()), SourceType::OcuSync);
        assert_eq!(rec.model.as_deref(), Some("Mavic 2"));
        assert_eq!(rec.packet_length, 94);
        assert_eq!(rec.packet_type, "DroneID v2");
        assert_eq!(rec.state_info.as_deref(), Some("0xf71f"));
        assert_eq!(rec.height, Some(61.0));
        assert_eq!(rec.yaw, Some(254.78));
        assert!((rec.total_speed.unwrap() - 0.15427248620541512).abs() < 1e-12);
        assert_eq!(rec.pilot_gps_clock, Some(1573423763.012));
        assert_eq!(rec.uuid_len, Some(19));
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"source_type\":\"OcuSync (SDR)\""));
        assert!(json.contains("\"height\":61.0"));
    }

    #[test]
    fn zero_speed() {
        let mut f = sample_v2();
        f.x_speed = Speed(0);
        f.y_speed = Speed(0);
        f.z_speed = Speed(0);
        let rec = to_detection_record(&DroneIdFrame::FlightInfoV2(f), SourceType::OcuSync);
        assert_eq!(rec.total_speed, Some(0.0));
    }

    #[test]
    fn unknown_model_id_falls_back_to_serial() {
        let mut f = sample_v2();
        f.model_id = 250;
        f.serial = "08Q0000".into();
        let rec = to_detection_record(&DroneIdFrame::FlightInfoV2(f), SourceType::OcuSync);
        assert_eq!(rec.model.as_deref(), Some("Mavic Pro"));
    }
}
