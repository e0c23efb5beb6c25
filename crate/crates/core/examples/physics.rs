//! Power and recharge models for both vehicles.

use coop_route::ugv::ugv_power;
use coop_route::vrp::{recharge_time, uav_power, RechargeModel};

pub fn main() {
    println!("speed  uav_power_W  ugv_power_W");
    for v in [0.0, 2.0, 4.0, 6.0, 10.0, 15.0] {
        let ugv = ugv_power(v).map_or("-".to_string(), |p| format!("{p:.1}"));
        println!("{v:>5.1}  {:>11.2}  {ugv:>11}", uav_power(v).unwrap());
    }
    let m = RechargeModel::default();
    println!("\nenergy_kJ  recharge_s");
    for e_kj in [0.0, 100.0, 200.0, 270.4, 280.0, 287.7] {
        println!("{e_kj:>9.1}  {:>10.1}", recharge_time(e_kj * 1e3).unwrap());
    }
    let endurance = m.capacity / uav_power(10.0).unwrap();
    println!(
        "\nendurance at 10 m/s: {endurance:.0} s, out-and-back radius {:.0} m",
        endurance * 10.0 / 2.0
    );
}
