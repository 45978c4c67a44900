#!/usr/bin/env python3
"""
Verify that all required dependencies are installed and can be imported
"""

def check_import(module_name, description):
    """Try importing a module"""
    try:
        __import__(module_name)
        print(f"✅ {description}")
        return True
    except ImportError as e:
        print(f"❌ {description} - {e}")
        return False

def main():
    """Check all required imports"""
    print("🔍 Verifying Dependencies...")
    print("=" * 50)

    dependencies = [
        ("numpy", "NumPy Numerical Computing"),
        ("scipy.linalg", "SciPy Linear Algebra"),
        ("scipy.stats", "SciPy Distributions"),
        ("pandas", "Pandas Data Processing"),
        ("pydantic", "Pydantic Data Validation"),
        ("httpx", "HTTPX HTTP Client"),
        ("dotenv", "Python Dotenv"),
        ("pytest", "Pytest Test Runner"),
    ]

    available = sum(check_import(module, description) for module, description in dependencies)

    print("\n" + "=" * 50)
    print(f"📊 Results: {available}/{len(dependencies)} dependencies available")
    if available != len(dependencies):
        print("❌ Install the missing packages with: pip install -r requirements.txt")
        return False

    print("\n🧪 Testing Core Functionality...")
    try:
        import numpy as np
        from econometrics.linreg import ols
        from econometrics.ardl import pesaran_cv

        rng = np.random.default_rng(0)
        X = np.column_stack([np.ones(20), rng.standard_normal(20)])
        fit = ols(X @ np.array([1.0, 2.0]) + 0.1 * rng.standard_normal(20), X)
        print(f"✅ OLS works (slope {fit.coefficients[1]:.3f})")
        print(f"✅ Bounds table works (k=5, 5%: {pesaran_cv(5, '5%')})")
    except Exception as e:
        print(f"❌ Core functionality check failed: {e}")
        return False

    print("🎉 All dependencies are properly installed!")
    return True

if __name__ == "__main__":
    main()
