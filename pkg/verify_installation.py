"""
Installation Verification Script

Run this script to verify that QMaxFlow is properly installed and configured.
"""

import sys
import importlib
import platform


def check_python_version():
    """Check if Python version is adequate."""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 8):
        print(f"❌ Python {version.major}.{version.minor} is too old. Python 3.8+ required.")
        return False
    print(f"✅ Python {version.major}.{version.minor}.{version.micro}")
    return True


def check_module(module_name, display_name=None):
    """Check if a module can be imported."""
    if display_name is None:
        display_name = module_name

    try:
        module = importlib.import_module(module_name)
        version = getattr(module, "__version__", "")
        print(f"✅ {display_name} {version}".rstrip())
        return True
    except ImportError:
        print(f"❌ {display_name} - Not installed")
        return False


def check_directories():
    """Check the configuration and log directories."""
    from config import get_config

    print("\n📁 Checking directories:")

    config = get_config()
    for label, path in (("Config directory", config.config_dir),
                        ("Data directory", config.data_dir),
                        ("Log directory", config.get_logs_path())):
        if path.exists():
            print(f"✅ {label}: {path}")
        else:
            print(f"⚠️  {label} will be created: {path}")


def check_smoke():
    """Compute the min cut and one rank sample of the three-vertex example."""
    from core.flow import quantum_min_cut
    from core.tensor import PrimeField, contract, random_assignment
    from utils.fixtures import fig3

    print("\n🧮 Smoke test:")
    net = fig3()
    qmc = quantum_min_cut(net)
    rank = contract(net, random_assignment(net, PrimeField(), seed=0)).rank()
    ok = qmc == 8 and rank <= qmc
    print(f"{'✅' if ok else '❌'} fig3: QMC {qmc}, sampled rank {rank}")
    return ok


def main():
    """Run all verification checks."""
    print("=" * 70)
    print("QMaxFlow Installation Verification")
    print("=" * 70)

    print(f"\n🖥️  Platform: {platform.system()} {platform.release()}")

    print("\n🐍 Python Version:")
    if not check_python_version():
        print("\n❌ Installation verification failed!")
        return 1

    print("\n📦 Core Dependencies:")
    all_ok = True

    modules_to_check = [
        ("numpy", "numpy"),
        ("scipy", "scipy"),
        ("networkx", "networkx"),
        ("sympy", "sympy"),
        ("appdirs", "appdirs"),
        ("hypothesis", "hypothesis (tests only)"),
    ]

    for module, display in modules_to_check:
        if not check_module(module, display):
            all_ok = False

    try:
        check_directories()
    except Exception as e:
        print(f"\n⚠️  Directory check failed: {e}")

    if all_ok:
        try:
            all_ok = check_smoke()
        except Exception as e:
            print(f"\n❌ Smoke test failed: {e}")
            all_ok = False

    print("\n" + "=" * 70)
    if all_ok:
        print("✅ Installation verification successful!")
        print("\nYou can now run QMaxFlow:")
        print("  python main.py qmc networks/fig3.net")
    else:
        print("⚠️  Some checks failed!")
        print("\nPlease install missing dependencies:")
        print("  pip install -r requirements.txt")
    print("=" * 70)

    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
