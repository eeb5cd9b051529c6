"""
URL configuration for qbench project.

Run records are read-only over the API; everything else happens through
the bench_* management commands.
"""
from django.contrib import admin
from django.urls import path, include
from rest_framework import routers
from runs.api import RunRecordViewSet
from drf_spectacular.views import SpectacularAPIView, SpectacularSwaggerView

router = routers.DefaultRouter()
router.register(r'runs', RunRecordViewSet, basename='runrecord')

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/schema/', SpectacularAPIView.as_view(), name='schema'),
    path('api/docs/', SpectacularSwaggerView.as_view(url_name='schema'), name='swagger-ui'),
    path('api/', include(router.urls)),
]
