"""Regenerate the bundled seed corpus at src/stlkit/data/seeds.jsonl.

Each formula is canonicalized and every pair is checked: syntax ok with no
warnings, canonical fixed point, and self-retrieval at rank 1.
"""

from __future__ import annotations

import json
from pathlib import Path

from stlkit.knowledge import KnowledgeStore
from stlkit.pairs import NLSTLPair
from stlkit.stl.parser import check_syntax, parse
from stlkit.stl.printer import format_formula

RAW = [
    # --- autonomous driving ---
    ("autonomous-driving", "Within the first 27 time units, whenever the speed exceeds 50, the rpm must drop below 3000 within 1 to 3 time units.",
     "G[0,27]((speed > 50) -> F[1,3](rpm < 3000))"),
    ("autonomous-driving", "During the first 60 seconds, if an obstacle comes within 1 meter, the vehicle must reach and keep a separation of at least 1.5 meters for 30 consecutive seconds, starting within 50 seconds.",
     "G[0,60]((d_obs < 1) -> F[0,50] G[0,30] (d_obs >= 1.5))"),
    ("autonomous-driving", "The speed never exceeds 120 during the first 300 time units.",
     "G[0,300](speed <= 120)"),
    ("autonomous-driving", "The car reaches a speed of at least 60 somewhere between 10 and 20 seconds.",
     "F[10,20](speed >= 60)"),
    ("autonomous-driving", "Between 5 and 45 seconds, braking force stays below 0.8 until the gap grows beyond 12 meters.",
     "(brake < 0.8) U[5,45] (gap > 12)"),
    ("autonomous-driving", "Whenever the lane offset magnitude exceeds 0.4 in the first 100 seconds, it returns below 0.1 within 5 seconds.",
     "G[0,100]((|lane_offset| > 0.4) -> F[0,5](|lane_offset| < 0.1))"),
    ("autonomous-driving", "For the first 90 seconds, the headway is at least 2 seconds whenever cruise control is engaged.",
     "G[0,90]((cruise == 1) -> (headway >= 2))"),
    ("autonomous-driving", "At some point between 15 and 25 seconds the acceleration magnitude stays within 2 for 5 straight seconds.",
     "F[15,25] G[0,5] (|accel| <= 2)"),
    ("autonomous-driving", "If the traffic light shows red during the first 40 seconds, the car comes to a stop within 6 seconds.",
     "G[0,40]((light == 0) -> F[0,6](speed < 0.5))"),
    ("autonomous-driving", "The combined torque of the front and rear motors never exceeds 400 during the first 120 seconds.",
     "G[0,120](torque_front + torque_rear <= 400)"),
    ("autonomous-driving", "Throughout the first 30 seconds, either the turn signal is on or the steering angle stays under 15 degrees.",
     "G[0,30]((signal == 1) | (steer < 15))"),
    ("autonomous-driving", "The fuel level drops below 10 at some time in the first 500 time units.",
     "F[0,500](fuel < 10)"),
    ("autonomous-driving", "During the first 200 seconds the gear is never in reverse while the speed is above 5.",
     "G[0,200](!(gear == -1 & speed > 5))"),
    ("autonomous-driving", "The crossing alarm stays active until the distance to the crossing shrinks below 3, which happens between 8 and 16 seconds.",
     "(alarm > 0) U[8,16] (d_cross < 3)"),
    # --- robotics ---
    ("robotics", "The arm reaches the target zone within 12 time units.",
     "F[0,12](d_target < 0.05)"),
    ("robotics", "The gripper force stays between 2 and 8 newtons for the whole first minute.",
     "G[0,60](force >= 2 & force <= 8)"),
    ("robotics", "Whenever the battery drops under 20 percent in the first 600 seconds, the robot docks within 90 seconds.",
     "G[0,600]((battery < 20) -> F[0,90](docked == 1))"),
    ("robotics", "The robot keeps at least 0.3 meters from the wall until the sweep finishes, within 240 seconds.",
     "(d_wall >= 0.3) U[0,240] (sweep_done == 1)"),
    ("robotics", "The second joint's angular speed magnitude never exceeds 1.5 in the first 30 seconds.",
     "G[0,30](|joint2_vel| <= 1.5)"),
    ("robotics", "Between 10 and 50 seconds the payload is held above 1 meter for 20 consecutive seconds.",
     "F[10,50] G[0,20] (height > 1)"),
    ("robotics", "If a human enters the cell in the first 400 seconds, the robot halts within half a second and stays halted for 10 seconds.",
     "G[0,400]((human == 1) -> F[0,0.5] G[0,10] (moving == 0))"),
    ("robotics", "Between 30 and 60 seconds the end effector's deviation from the 0.5 setpoint stays below 0.05.",
     "G[30,60](|pos - 0.5| < 0.05)"),
    ("robotics", "The patrol visits waypoint A within 100 seconds and then waypoint B within a further 80 seconds.",
     "F[0,100]((at_a == 1) & F[0,80](at_b == 1))"),
    ("robotics", "During the 480-unit shift the conveyor never runs while the guard is open.",
     "G[0,480]((guard == 0) -> (conveyor == 0))"),
    ("robotics", "Twice the lift motor current stays under 30 for the first 90 seconds.",
     "G[0,90](2 * current < 30)"),
    ("robotics", "Between 200 and 300 seconds the charge level rises above 95 and the charger disconnects within 15 seconds after that.",
     "F[200,300]((charge > 95) & F[0,15](plugged == 0))"),
    ("robotics", "The tool temperature stays below 80 degrees until coolant flow starts, within the first 45 seconds.",
     "(temp_tool < 80) U[0,45] (coolant > 0.2)"),
    # --- electronics ---
    ("electronics", "The supply voltage stays within 0.2 volts of 3.3 during the first 1000 microseconds.",
     "G[0,1000](|v_supply - 3.3| <= 0.2)"),
    ("electronics", "After power-on the clock amplitude settles above 0.9 within 50 microseconds.",
     "F[0,50](clk > 0.9)"),
    ("electronics", "Whenever the input current exceeds 2 amperes in the first 500 cycles, the breaker opens within 3 cycles.",
     "G[0,500]((i_in > 2) -> F[0,3](breaker == 1))"),
    ("electronics", "The output ripple never exceeds 0.05 between cycles 100 and 900.",
     "G[100,900](ripple <= 0.05)"),
    ("electronics", "The capacitor charges past 4.5 volts somewhere between 20 and 40 milliseconds.",
     "F[20,40](v_cap > 4.5)"),
    ("electronics", "The enable line stays high until the reset pulse arrives, within 128 cycles.",
     "(enable == 1) U[0,128] (reset == 1)"),
    ("electronics", "If the temperature passes 70 in the first 3600 seconds, the fan reaches at least 95 percent speed within 10 seconds and holds it for 60 seconds.",
     "G[0,3600]((temp > 70) -> F[0,10] G[0,60] (fan >= 0.95))"),
    ("electronics", "The difference between the two rail voltages stays below 0.1 for the first 250 units.",
     "G[0,250](|v_rail_a - v_rail_b| < 0.1)"),
    ("electronics", "The watchdog fires at least once between 1000 and 2000 cycles.",
     "F[1000,2000](watchdog == 1)"),
    ("electronics", "While the self-test runs during the first 75 units, the error flag never rises.",
     "G[0,75]((selftest == 1) -> (error == 0))"),
    ("electronics", "Throughout cycles 50 to 450 the load current is below 1.2 or the auxiliary converter is active.",
     "G[50,450]((i_load < 1.2) | (aux == 1))"),
    ("electronics", "The transmitted power stays under a third of the 90-watt limit until the antenna locks, within 30 seconds.",
     "(p_tx < 90 / 3) U[0,30] (lock == 1)"),
    ("electronics", "Some time in the first 20 seconds the phase error stays within 0.01 for 5 straight seconds.",
     "F[0,20] G[0,5] (|phase_err| < 0.01)"),
]


def main() -> None:
    pairs = []
    for i, (domain, nl, stl) in enumerate(RAW, start=1):
        result = check_syntax(stl)
        assert result.ok, (stl, [d.render() for d in result.diagnostics])
        assert not result.diagnostics, (stl, [d.render() for d in result.diagnostics])
        canonical = format_formula(parse(stl))
        assert parse(canonical) == parse(stl), stl
        assert format_formula(parse(canonical)) == canonical, stl
        pairs.append(
            NLSTLPair(
                id=f"seed-{i:03d}", nl=nl, stl=canonical, domain=domain,
                source="handcrafted", round=0, status="seed",
            )
        )
    assert len({p.nl for p in pairs}) == len(pairs), "duplicate sentences"
    store = KnowledgeStore(pairs)
    for p in pairs:
        top = store.top_k(p.nl, 1)[0]
        assert top.pair.id == p.id, (p.id, top.pair.id, top.score)
    out = Path(__file__).resolve().parents[1] / "src" / "stlkit" / "data" / "seeds.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(pairs)} pairs to {out}")


if __name__ == "__main__":
    main()
