# Codec weights are filled from this seed
CODEC_SEED = 0x360A11CE

# Spatial downsample factor of the latent grid
LATENT_FACTOR = 8
LATENT_CHANNELS = 4

# Camera augmentation ranges, degrees: (lo, hi)
DEFAULT_FOV_RANGE = (30.0, 120.0)
DEFAULT_PITCH_RANGE = (-60.0, 60.0)
DEFAULT_ROLL_RANGE = (-15.0, 15.0)
DEFAULT_YAW_RANGE = (-180.0, 180.0)

# Trajectory simulation defaults (deg/frame, deg)
DEFAULT_MAX_RATES = {'yaw': 0.5, 'pitch': 0.25, 'roll': 0.1}
DEFAULT_NOISE_STD = 0.05
DEFAULT_SIM_PROB = 0.8

# Calibration search grid: (lo, hi, coarse step, fine step)
DEFAULT_SEARCH_GRID = {
    'fov': (30.0, 120.0, 5.0, 0.5),
    'pitch': (-60.0, 60.0, 5.0, 0.5),
    'roll': (-15.0, 15.0, 2.5, 0.25),
}
DEFAULT_RENDER_SIZE = 64
YAW_RING_STEP = 10.0

# Circular decode pad in latent columns
DEFAULT_DECODE_PAD = 2

# Integral column offsets within this tolerance are applied as exact shifts
SHIFT_SNAP_TOL = 1e-6

FRAME_PATTERN = 'frame_{:04d}'
CUBE_FACES = ('front', 'right', 'back', 'left', 'up', 'down')
