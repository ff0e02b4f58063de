import os
import sys
import json
import logging
from dotenv import load_dotenv
import toml

# Add parent directory to Python path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.append(parent_dir)

project_root = os.path.dirname(parent_dir)
config_dir = os.path.join(project_root, 'config')

# Load environment variables
load_dotenv(os.path.join(config_dir, '.env'))

logger = logging.getLogger("config")


class Config:
    """
    Lab configuration: environment overrides on top of versioned TOML defaults
    """
    def __init__(self, defaults_path=None):
        self.log_level = os.getenv('LAB_LOG_LEVEL', 'INFO').upper()
        self.output_dir = os.getenv('LAB_OUTPUT_DIR', os.path.join(project_root, 'results'))
        self.jobs = int(os.getenv('LAB_JOBS', 1))

        self.defaults_path = defaults_path or os.path.join(config_dir, 'lab.toml')
        self.defaults = self._load_defaults()

    def _load_defaults(self):
        """
        Load default parameters and tolerances from the TOML file

        Returns:
            dict: Parsed TOML tables, empty if the file is missing or unreadable
        """
        if not os.path.exists(self.defaults_path):
            logger.warning(f"Defaults file not found at {self.defaults_path}, using built-in values")
            return {}
        try:
            return toml.load(self.defaults_path)
        except Exception as e:
            logger.error(f"Error loading defaults file: {e}")
            return {}

    def get(self, section, key, default=None):
        """
        Get a default value from a TOML table

        Args:
            section (str): Table name, dotted for nested tables (e.g. 'resolvent.case_ii')
            key (str): Key inside the table
            default: Value returned when the key is absent

        Returns:
            The configured value or default
        """
        table = self.section(section)
        return table.get(key, default)

    def section(self, section):
        """
        Get a whole TOML table as a dict (empty when absent)
        """
        table = self.defaults
        for part in section.split('.'):
            table = table.get(part, {}) if isinstance(table, dict) else {}
        return dict(table) if isinstance(table, dict) else {}

    def tolerance(self, name, default=None):
        """
        Get a pass/fail tolerance by name
        """
        return self.get('tolerances', name, default)

    @staticmethod
    def load_json(file_path):
        """
        Load a JSON document

        Args:
            file_path (str): Path to the JSON file

        Returns:
            dict: Parsed document
        """
        with open(file_path, 'r') as f:
            document = json.load(f)
        logger.info(f"Loaded JSON document from {file_path}")
        return document


# Global config instance
config = Config()
