# Generated by Django 4.2.7 on 2026-10-17 09:12

import django.core.validators
from django.db import migrations, models
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('suite', models.CharField(choices=[('singlet', 'Singlet correlations'), ('adder', 'Two-bit Fourier adder'), ('identity', 'CNOT identity sequences'), ('surface', '[[5,1,2]] surface code'), ('code513', '[[5,1,3]] encoder')], help_text='Benchmark family of the case', max_length=20)),
                ('case_name', models.CharField(help_text='Benchmark case name', max_length=255)),
                ('params', models.JSONField(blank=True, default=dict, help_text='Generator parameters of the case')),
                ('backend', models.CharField(choices=[('ideal', 'Ideal simulator'), ('noisy', 'Noisy simulator'), ('external', 'External hardware')], default='ideal', help_text='Source of the counts', max_length=20)),
                ('shots', models.PositiveIntegerField(help_text='Number of shots N', validators=[django.core.validators.MinValueValidator(1)])),
                ('seed', models.BigIntegerField(blank=True, help_text='Seed the counts were sampled with, if simulated', null=True)),
                ('counts_path', models.CharField(help_text='Path of counts.json', max_length=1024)),
                ('verdict_class', models.CharField(choices=[('Correct', 'Correct'), ('Wrong', 'Wrong'), ('UnexpectedSuperposition', 'Unexpected superposition'), ('Inconclusive', 'Inconclusive')], help_text='Verdict of the counts against the case oracle', max_length=30)),
                ('top_state', models.JSONField(blank=True, default=list, help_text='Most frequent outcome and its frequency')),
                ('tool_version', models.CharField(help_text='qbench version that wrote the record', max_length=20)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Run record',
                'verbose_name_plural': 'Run records',
                'db_table': 'run_records',
                'ordering': ['case_name', 'created_at'],
                'indexes': [models.Index(fields=['case_name', 'created_at'], name='run_records_case_na_5f2c1e_idx'), models.Index(fields=['suite'], name='run_records_suite_8a13d0_idx')],
            },
        ),
    ]
