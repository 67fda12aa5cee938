APP_KAY = "optocool"

# 环境变量: 线程数
THREADS_ENV = "OPTOCOOL_THREADS"

# 默认参数 (fig2 基础参数组, 频率单位为 ω_m)
DEFAULT_CONFIG: dict[str, float | int] = {
    "omega_m_hz": 20.0e6,
    "kappa1": 0.1,
    "kappa2": 3.0,
    "gamma": 0.1,
    "q_m": 8.0e4,
    "delta1": -1.0,
    "delta2_effective": 1.0,
    "omega_atom": -1.0,
    "J": 0.0,
    "g_a": 0.0,
    "N": 200,
    "g": 1.2e-4,
    "epsilon": 6000.0,
    "epsilon_phase": 0.0,
    "temperature_k": 0.3,
}

# 默认频率网格
OMEGA_MIN = -4.0
OMEGA_MAX = 4.0
OMEGA_POINTS = 4001

# 数值容差
RESIDUAL_TOL = 1e-10
WEAK_COUPLING_WARN = 0.3
TAIL_TOL = 1e-10
CONSERVATION_TOL = 1e-9
NEGATIVE_PROB_TOL = 1e-12
ODE_RTOL = 1e-10
ODE_ATOL = 1e-14
