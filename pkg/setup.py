"""
glupoly Setup Script
Installs dependencies and prepares the working directories
"""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).parent


def print_header(text):
    """Print a formatted header"""
    print("\n" + "=" * 60)
    print(f"  {text}")
    print("=" * 60 + "\n")


def check_python_version():
    """Check if Python version is compatible"""
    print_header("Checking Python Version")

    version = sys.version_info
    print(f"Python version: {version.major}.{version.minor}.{version.micro}")

    if version < (3, 9):
        print("❌ ERROR: Python 3.9 or higher is required")
        return False

    print("✓ Python version is compatible")
    return True


def install_dependencies():
    """Install Python dependencies"""
    print_header("Installing Dependencies")

    requirements_file = ROOT / "requirements.txt"
    if not requirements_file.exists():
        print("❌ ERROR: requirements.txt not found")
        return False

    try:
        subprocess.check_call([
            sys.executable, '-m', 'pip', 'install', '-r', str(requirements_file), '--upgrade'
        ])
        print("\n✓ All dependencies installed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"\n❌ ERROR: Failed to install dependencies: {e}")
        return False


def create_directories():
    """Create necessary directories"""
    print_header("Creating Directories")

    for directory in ('config', 'logs', 'out'):
        (ROOT / directory).mkdir(parents=True, exist_ok=True)
        print(f"✓ Created: {directory}")

    return True


def check_configuration():
    """Write the default settings file if missing and validate it"""
    print_header("Checking Configuration")

    sys.path.append(str(ROOT))
    from src.core.config_manager import config

    is_valid, errors = config.validate()
    for error in errors:
        print(f"⚠ {error}")
    if is_valid:
        print(f"✓ Configuration is valid: {config.config_path}")
    return is_valid


def print_completion_message():
    print_header("Setup Complete!")
    print("Next Steps:\n")
    print("1. List the catalog:        python glupoly.py catalog --list")
    print("2. Classify gluing data:    python glupoly.py classify --data sierpinski")
    print("3. Run the test suite:      python -m pytest\n")
    print("For help, run: python glupoly.py --help\n")


def main():
    """Main setup routine"""
    print_header("glupoly Setup")

    steps = [
        ("Checking Python version", check_python_version),
        ("Creating directories", create_directories),
        ("Installing dependencies", install_dependencies),
        ("Checking configuration", check_configuration),
    ]

    for step_name, step_func in steps:
        if not step_func():
            print(f"\n❌ Setup failed at: {step_name}")
            print("Please fix the errors and run setup.py again.")
            return False

    print_completion_message()
    return True


if __name__ == '__main__':
    try:
        success = main()
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print("\n\n⚠ Setup interrupted by user")
        sys.exit(1)
