"""
Configuration Manager for glupoly
Handles loading, saving, and validating budgets, tolerances and seeds
"""

import copy
import json
from pathlib import Path
from typing import Any, Dict

PROJECT_ROOT = Path(__file__).parent.parent.parent


class ConfigManager:
    """Manages engine configuration"""

    DEFAULT_CONFIG = {
        "budgets": {
            "brute_force_vertices": 25,
            "build_vertices": 1000000,
            "poly_degree": 100000
        },
        "tolerances": {
            "chart_threshold": 1e-14,
            "indeterminacy": 1e-300,
            "rank_pivot": 1e-8,
            "convergence": 1e-10,
            "root_update": 1e-13,
            "root_residual": 1e-8,
            "real_snap": 1e-10,
            "residual_floor": 1e-14
        },
        "zeros": {
            "plateau_ratio": 1.2,
            "growth_ratio": 1.5,
            "max_iterations": 500,
            "precision_ladder": [53, 106, 212]
        },
        "dynamics": {
            "fm_search_factor": 2,
            "orbit_iterations": 60,
            "contraction_ladder": [1e-2, 1e-3, 1e-4]
        },
        "run": {
            "seed": 20240517,
            "output_dir": "out"
        }
    }

    def __init__(self, config_path=PROJECT_ROOT / "config" / "settings.json"):
        self.config_path = Path(config_path)
        self.config = self._load_config()
        # Save default config if file didn't exist
        if not self.config_path.exists():
            self.save()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file or create default"""
        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    loaded_config = json.load(f)
                    return self._merge_configs(self.DEFAULT_CONFIG, loaded_config)
            except (OSError, ValueError) as e:
                print(f"Error loading config: {e}. Using defaults.")
                return copy.deepcopy(self.DEFAULT_CONFIG)
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        return copy.deepcopy(self.DEFAULT_CONFIG)

    def _merge_configs(self, default: Dict, loaded: Dict) -> Dict:
        """Recursively merge loaded config with defaults"""
        merged = copy.deepcopy(default)
        for key, value in loaded.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge_configs(merged[key], value)
            else:
                merged[key] = value
        return merged

    def save(self):
        """Save current configuration to file"""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, 'w', encoding='utf-8') as f:
            json.dump(self.config, f, indent=2, sort_keys=True)
            f.write("\n")

    def get(self, key_path: str, default=None) -> Any:
        """
        Get configuration value using dot notation
        Example: config.get('budgets.brute_force_vertices')
        """
        keys = key_path.split('.')
        value = self.config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, key_path: str, value: Any, save_immediately=True):
        """
        Set configuration value using dot notation
        Example: config.set('run.seed', 7)
        """
        keys = key_path.split('.')
        config_ref = self.config

        for key in keys[:-1]:
            if key not in config_ref:
                config_ref[key] = {}
            config_ref = config_ref[key]

        config_ref[keys[-1]] = value

        if save_immediately:
            self.save()

    def validate(self) -> tuple[bool, list[str]]:
        """
        Validate configuration
        Returns: (is_valid, list_of_errors)
        """
        errors = []

        for name, value in self.get('budgets', {}).items():
            if not isinstance(value, int) or value <= 0:
                errors.append(f"Budget '{name}' must be a positive integer")

        for name, value in self.get('tolerances', {}).items():
            if not isinstance(value, (int, float)) or not 0 < value < 1:
                errors.append(f"Tolerance '{name}' must lie in (0, 1)")

        ladder = self.get('zeros.precision_ladder', [])
        if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
            errors.append("Precision ladder must be non-empty and strictly increasing")

        for key in ('zeros.plateau_ratio', 'zeros.growth_ratio'):
            if self.get(key, 0) <= 1:
                errors.append(f"{key} must be greater than 1")

        contraction = self.get('dynamics.contraction_ladder', [])
        if len(contraction) < 3:
            errors.append("Contraction ladder needs at least three steps")

        if self.get('dynamics.fm_search_factor', 0) < 1:
            errors.append("FM search factor must be at least 1")

        return (len(errors) == 0, errors)

    def snapshot(self) -> Dict[str, Any]:
        """Copy of the settings that influence outputs (for run manifests)"""
        return {key: copy.deepcopy(self.config[key])
                for key in ('budgets', 'tolerances', 'zeros', 'dynamics', 'run')
                if key in self.config}

    def reset_to_defaults(self):
        """Reset configuration to defaults"""
        self.config = copy.deepcopy(self.DEFAULT_CONFIG)
        self.save()

    def export_config(self, export_path: str):
        """Export configuration to a different file"""
        with open(export_path, 'w', encoding='utf-8') as f:
            json.dump(self.config, f, indent=2, sort_keys=True)

    def import_config(self, import_path: str):
        """Import configuration from another file"""
        with open(import_path, 'r', encoding='utf-8') as f:
            imported = json.load(f)
            self.config = self._merge_configs(self.DEFAULT_CONFIG, imported)
            self.save()


# Global config instance
config = ConfigManager()
