"""Value types shared by the Fracrot engine."""
