from setuptools import setup, find_packages

setup(
    name='fockrec',
    version='0.1.0',
    # Código de produção em 'modules' e 'config'; a CLI fica em main.py
    packages=find_packages(include=['modules', 'modules.*', 'config']),
    py_modules=['main'],
    install_requires=['numpy', 'scipy', 'pandas', 'python-dotenv'],
    entry_points={'console_scripts': ['fockrec=main:main']},
)
