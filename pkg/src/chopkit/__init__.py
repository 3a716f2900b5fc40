"""Kinematics, workspace analysis, sensing, and grasp planning for a
dual-chopstick robot end effector."""

from .config import (
    DualConfig,
    MechanismParams,
    PlatformCommand,
    TipPose,
    default_dual_config,
    default_params,
    dump_config,
    load_config,
    parse_config,
    save_config,
)
from .geometry import (
    Circle2,
    Sphere3,
    SphericalDir,
    backend_mount_position,
    circle_circle_intersect,
    pick_feasible_intersection,
    sphere_plane_circle,
)
from .kinematics import (
    IkSolution,
    forward_kinematics,
    inverse_kinematics,
    solve_tilt,
    travel_to_servo_rotation,
)
from .hull import ConvexHull3, convex_hull, hull_to_off, save_hull_off
from .workspace import (
    BacklashModel,
    WorkspaceSample,
    default_box,
    sample_workspace,
    simulate_observed,
)
from .validation import (
    ErrorReport,
    PosePairRecord,
    error_report,
    ingest_csv,
    render_report,
)
from .sensing import (
    FtSample,
    GripCycle,
    SensorModel,
    StiffnessEstimate,
    detect_contact,
    estimate_stiffness,
    make_grip_cycles,
    quantize,
    simulate_grip_cycle,
    tare,
)
from .grasp import (
    FoodItem,
    PinchPlan,
    TrialTrajectory,
    build_trial_trajectory,
    load_food_items,
    plan_pinch,
    predict_slip,
    run_trial_suite,
)
from .bus import (
    BusFrame,
    LoopbackBus,
    ServoSimState,
    decode,
    encode,
    step_servo,
)

__version__ = "0.1.0"
