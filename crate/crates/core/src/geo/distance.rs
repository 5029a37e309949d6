use crate::scalar::Scalar;

/// Mean Earth radius (IUGG) in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon<T> {
    pub lat: T,
    pub lon: T,
}

impl<T: Scalar> LatLon<T> {
    pub fn new(lat: T, lon: T) -> Self {
        Self { lat, lon }
    }
}

/// Great-circle distance in km.
pub fn haversine<T: Scalar>(a: LatLon<T>, b: LatLon<T>) -> T {
    let two = T::lit(2.0);
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = p2 - p1;
    let dlambda = (b.lon - a.lon).to_radians();
    let s_phi = (dphi / two).sin();
    let s_lambda = (dlambda / two).sin();
    let h = s_phi * s_phi + p1.cos() * p2.cos() * s_lambda * s_lambda;
    let c = two * h.sqrt().min(T::one()).asin();
    T::lit(EARTH_RADIUS_KM) * c
}

pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    haversine(LatLon::new(lat1, lon1), LatLon::new(lat2, lon2))
}

/// Equirectangular projection to km about a reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProjection<T> {
    origin: LatLon<T>,
    cos_lat: T,
}

impl<T: Scalar> LocalProjection<T> {
    pub fn new(origin: LatLon<T>) -> Self {
        Self { origin, cos_lat: origin.lat.to_radians().cos() }
    }

    /// `(x_km, y_km)`, x pointing east and y north.
    pub fn project(&self, p: LatLon<T>) -> (T, T) {
        let r = T::lit(EARTH_RADIUS_KM);
        let x = r * (p.lon - self.origin.lon).to_radians() * self.cos_lat;
        let y = r * (p.lat - self.origin.lat).to_radians();
        (x, y)
    }
}
